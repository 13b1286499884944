/**
 * Binary embedding container shared with the Python pipeline.
 *
 * Layout (little-endian): magic "TPRN" | version u32 (=1) | N u64 | D u64 |
 * C u64 | N*D float32 row-major features | N int32 labels.
 */

import { readFileSync, writeFileSync } from 'fs'

export const MAGIC = 'TPRN'
export const VERSION = 1
const HEADER_BYTES = 4 + 4 + 8 * 3

export class TprnFormatError extends Error {}

export interface EmbeddingFile {
  samples: number
  width: number
  classes: number
  data: Float32Array // row-major, samples x width
  labels: Int32Array
}

export function encodeTprn(file: EmbeddingFile): Buffer {
  const { samples, width, classes, data, labels } = file
  if (samples < 1 || width < 1 || classes < 1) {
    throw new TprnFormatError(`need positive N, D, C; got ${samples}, ${width}, ${classes}`)
  }
  if (data.length !== samples * width) {
    throw new TprnFormatError(`data holds ${data.length} floats, expected ${samples * width}`)
  }
  if (labels.length !== samples) {
    throw new TprnFormatError(`${labels.length} labels for ${samples} rows`)
  }
  for (let i = 0; i < labels.length; i++) {
    if (labels[i] < 0 || labels[i] >= classes) {
      throw new TprnFormatError(`label ${labels[i]} at row ${i} outside [0, ${classes})`)
    }
  }
  const buf = Buffer.alloc(HEADER_BYTES + 4 * data.length + 4 * labels.length)
  buf.write(MAGIC, 0, 'ascii')
  buf.writeUInt32LE(VERSION, 4)
  buf.writeBigUInt64LE(BigInt(samples), 8)
  buf.writeBigUInt64LE(BigInt(width), 16)
  buf.writeBigUInt64LE(BigInt(classes), 24)
  let off = HEADER_BYTES
  for (let i = 0; i < data.length; i++, off += 4) {
    if (!Number.isFinite(data[i])) {
      throw new TprnFormatError(`non-finite feature value at flat index ${i}`)
    }
    buf.writeFloatLE(data[i], off)
  }
  for (let i = 0; i < labels.length; i++, off += 4) {
    buf.writeInt32LE(labels[i], off)
  }
  return buf
}

export function writeTprn(path: string, file: EmbeddingFile): void {
  writeFileSync(path, encodeTprn(file))
}

export function parseTprn(buf: Buffer): EmbeddingFile {
  if (buf.length < HEADER_BYTES || buf.toString('ascii', 0, 4) !== MAGIC) {
    throw new TprnFormatError('missing TPRN magic header')
  }
  const version = buf.readUInt32LE(4)
  if (version !== VERSION) {
    throw new TprnFormatError(`unsupported version ${version}`)
  }
  const samples = Number(buf.readBigUInt64LE(8))
  const width = Number(buf.readBigUInt64LE(16))
  const classes = Number(buf.readBigUInt64LE(24))
  const expected = HEADER_BYTES + 4 * samples * width + 4 * samples
  if (buf.length !== expected) {
    throw new TprnFormatError(`expected ${expected} bytes for N=${samples}, D=${width}, got ${buf.length}`)
  }
  const data = new Float32Array(samples * width)
  let off = HEADER_BYTES
  for (let i = 0; i < data.length; i++, off += 4) {
    data[i] = buf.readFloatLE(off)
    if (!Number.isFinite(data[i])) {
      throw new TprnFormatError(`non-finite feature value at flat index ${i}`)
    }
  }
  const labels = new Int32Array(samples)
  for (let i = 0; i < samples; i++, off += 4) {
    labels[i] = buf.readInt32LE(off)
    if (labels[i] < 0 || labels[i] >= classes) {
      throw new TprnFormatError(`label ${labels[i]} at row ${i} outside [0, ${classes})`)
    }
  }
  return { samples, width, classes, data, labels }
}

export function readTprn(path: string): EmbeddingFile {
  return parseTprn(readFileSync(path))
}
