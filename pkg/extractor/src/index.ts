export { CatalogEntry, CatalogError, FeatureModel, getEntry, listModels, registerModel } from './catalog'
export { DatasetError, DecodedImage, ImageFolder, decodeImage, listImageFolder } from './dataset'
export { ExtractionError, ExtractionSpec, ExtractionSummary, extractEmbeddings } from './extract'
export { EmbeddingFile, TprnFormatError, encodeTprn, parseTprn, readTprn, writeTprn } from './tprn'
