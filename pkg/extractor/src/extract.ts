/**
 * Batched feature extraction over an image folder, written as a TPRN file.
 *
 * Rows follow sorted relative file paths; labels follow sorted class
 * directory names; the declared width comes from the model catalog. The
 * run is deterministic: same files, same model, same bytes out.
 */

import * as path from 'path'

import * as tf from '@tensorflow/tfjs'

import { getEntry } from './catalog'
import { decodeImage, listImageFolder } from './dataset'
import { writeTprn } from './tprn'

export class ExtractionError extends Error {}

export interface ExtractionSpec {
  model: string
  dataDir: string
  outputPath: string
  batchSize?: number
  /** tfjs backend name; default leaves the engine's current backend */
  backend?: string
}

export interface ExtractionSummary {
  samples: number
  width: number
  classes: number
  classNames: string[]
  outputPath: string
}

export async function extractEmbeddings(spec: ExtractionSpec): Promise<ExtractionSummary> {
  const batchSize = spec.batchSize ?? 16
  if (batchSize < 1) {
    throw new ExtractionError(`batch size must be positive, got ${batchSize}`)
  }
  if (spec.backend) {
    const ok = await tf.setBackend(spec.backend)
    if (!ok) {
      throw new ExtractionError(`tfjs backend ${spec.backend} is not available`)
    }
  }
  await tf.ready()

  const entry = getEntry(spec.model)
  const model = await entry.load()
  const folder = listImageFolder(spec.dataDir)
  const n = folder.files.length
  const width = entry.penultimateWidth
  const data = new Float32Array(n * width)

  for (let start = 0; start < n; start += batchSize) {
    const stop = Math.min(start + batchSize, n)
    const batch = tf.tidy(() => {
      const resized: tf.Tensor3D[] = []
      for (let i = start; i < stop; i++) {
        const img = decodeImage(path.join(folder.root, folder.files[i]))
        const pixels = tf.tensor3d(img.rgb, [img.height, img.width, 3])
        resized.push(tf.image.resizeBilinear(pixels, [model.inputSize, model.inputSize]))
      }
      return tf.stack(resized) as tf.Tensor4D
    })
    const features = tf.tidy(() => model.embed(batch))
    batch.dispose()
    const [rows, cols] = features.shape
    if (rows !== stop - start || cols !== width) {
      features.dispose()
      throw new ExtractionError(
        `model ${spec.model} produced shape [${rows}, ${cols}]; the catalog ` +
          `declares a penultimate width of ${width}`,
      )
    }
    const values = await features.data()
    features.dispose()
    data.set(values, start * width)
  }

  writeTprn(spec.outputPath, {
    samples: n,
    width,
    classes: folder.classNames.length,
    data,
    labels: folder.labels,
  })
  return {
    samples: n,
    width,
    classes: folder.classNames.length,
    classNames: folder.classNames,
    outputPath: spec.outputPath,
  }
}
