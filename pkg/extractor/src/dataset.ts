/**
 * Image-folder datasets: one subdirectory per class, images inside.
 *
 * Class ids follow the lexicographically sorted subdirectory names and the
 * row order is the sorted relative file path, so two walks of the same
 * tree always agree.
 */

import { readdirSync, readFileSync, statSync } from 'fs'
import * as path from 'path'

import * as jpeg from 'jpeg-js'
import { PNG } from 'pngjs'

export class DatasetError extends Error {}

const IMAGE_EXTENSIONS = new Set(['.png', '.jpg', '.jpeg'])

export interface ImageFolder {
  root: string
  files: string[] // relative paths, sorted
  labels: Int32Array
  classNames: string[]
}

export function listImageFolder(root: string): ImageFolder {
  let entries
  try {
    entries = readdirSync(root, { withFileTypes: true })
  } catch (err) {
    throw new DatasetError(`cannot read dataset directory ${root}: ${(err as Error).message}`)
  }
  const classNames = entries
    .filter(e => e.isDirectory())
    .map(e => e.name)
    .sort()
  if (classNames.length === 0) {
    throw new DatasetError(
      `${root} holds no class subdirectories; expected <root>/<class>/<image> layout`,
    )
  }
  const files: string[] = []
  const labels: number[] = []
  classNames.forEach((cls, classId) => {
    const dir = path.join(root, cls)
    const images = readdirSync(dir)
      .filter(name => IMAGE_EXTENSIONS.has(path.extname(name).toLowerCase()))
      .filter(name => statSync(path.join(dir, name)).isFile())
      .sort()
    for (const name of images) {
      files.push(path.join(cls, name))
      labels.push(classId)
    }
  })
  if (files.length === 0) {
    throw new DatasetError(`${root} holds no ${[...IMAGE_EXTENSIONS].join('/')} images`)
  }
  return { root, files, labels: Int32Array.from(labels), classNames }
}

export interface DecodedImage {
  width: number
  height: number
  rgb: Float32Array // interleaved RGB in [0, 255]
}

export function decodeImage(filePath: string): DecodedImage {
  const ext = path.extname(filePath).toLowerCase()
  const blob = readFileSync(filePath)
  let width: number
  let height: number
  let rgba: Uint8Array
  if (ext === '.png') {
    const png = PNG.sync.read(blob)
    width = png.width
    height = png.height
    rgba = png.data
  } else if (ext === '.jpg' || ext === '.jpeg') {
    const img = jpeg.decode(blob, { useTArray: true })
    width = img.width
    height = img.height
    rgba = img.data
  } else {
    throw new DatasetError(`unsupported image type ${ext} at ${filePath}`)
  }
  const rgb = new Float32Array(width * height * 3)
  for (let p = 0, q = 0; p < rgba.length; p += 4, q += 3) {
    rgb[q] = rgba[p]
    rgb[q + 1] = rgba[p + 1]
    rgb[q + 2] = rgba[p + 2]
  }
  return { width, height, rgb }
}
