/** Shared test fixtures: a deterministic tiny model and a synthetic dataset. */

import { mkdirSync, writeFileSync } from 'fs'
import * as path from 'path'

import * as tf from '@tensorflow/tfjs'
import { PNG } from 'pngjs'

import { CatalogEntry, FeatureModel } from '../src/catalog'

export const TEST_MODEL_ID = 'unit-test-conv-64'
export const TEST_MODEL_WIDTH = 64

/**
 * A small seeded convolutional feature extractor. Weights come from tfjs's
 * seeded generators, so two loads produce identical embeddings; there is
 * nothing trainable or stochastic at inference time.
 */
export function testModelEntry(): CatalogEntry {
  return {
    id: TEST_MODEL_ID,
    penultimateWidth: TEST_MODEL_WIDTH,
    source: 'in-repo seeded test double',
    async load(): Promise<FeatureModel> {
      const k1 = tf.randomNormal([3, 3, 3, 8], 0, 0.5, 'float32', 41)
      const k2 = tf.randomNormal([3, 3, 8, 16], 0, 0.5, 'float32', 42)
      const proj = tf.randomNormal([16, TEST_MODEL_WIDTH], 0, 0.5, 'float32', 43)
      return {
        inputSize: 32,
        embed(batch: tf.Tensor4D): tf.Tensor2D {
          return tf.tidy(() => {
            const x = batch.div(127.5).sub(1.0) as tf.Tensor4D
            const h1 = tf.relu(tf.conv2d(x, k1 as tf.Tensor4D, 2, 'same'))
            const h2 = tf.relu(tf.conv2d(h1, k2 as tf.Tensor4D, 2, 'same'))
            const pooled = h2.mean([1, 2]) as tf.Tensor2D
            return tf.matMul(pooled, proj as tf.Tensor2D)
          })
        },
      }
    },
  }
}

/** Deterministic PNG content from a little multiplicative generator. */
function fillPixels(png: PNG, seed: number): void {
  let state = (seed * 2654435761) >>> 0
  const next = () => {
    state = (state * 1664525 + 1013904223) >>> 0
    return state >>> 24
  }
  for (let i = 0; i < png.data.length; i += 4) {
    png.data[i] = next()
    png.data[i + 1] = next()
    png.data[i + 2] = next()
    png.data[i + 3] = 255
  }
}

export function makeImageFolder(
  root: string,
  classes: string[],
  perClass: number,
  size = 24,
): void {
  mkdirSync(root, { recursive: true })
  classes.forEach((cls, c) => {
    const dir = path.join(root, cls)
    mkdirSync(dir, { recursive: true })
    for (let i = 0; i < perClass; i++) {
      const png = new PNG({ width: size, height: size })
      fillPixels(png, c * 1000 + i)
      writeFileSync(path.join(dir, `img_${String(i).padStart(3, '0')}.png`), PNG.sync.write(png))
    }
  })
}
