/**
 * Pretrained-model catalog.
 *
 * Every entry publishes the width of its penultimate layer so downstream
 * consumers can validate extracted files against it. Inference always runs
 * in evaluation mode with the model's own preprocessing and no
 * augmentation. `registerModel` lets callers add entries (local models,
 * test doubles) without touching the built-ins.
 */

import * as tf from '@tensorflow/tfjs'

export class CatalogError extends Error {}

export interface FeatureModel {
  /** square input side the model expects */
  inputSize: number
  /** [n, h, w, 3] pixels in [0, 255] -> [n, penultimateWidth] features */
  embed(batch: tf.Tensor4D): tf.Tensor2D
}

export interface CatalogEntry {
  id: string
  penultimateWidth: number
  source: string
  load(): Promise<FeatureModel>
}

const entries = new Map<string, CatalogEntry>()

export function registerModel(entry: CatalogEntry): void {
  if (entries.has(entry.id)) {
    throw new CatalogError(`model id ${entry.id} already registered`)
  }
  entries.set(entry.id, entry)
}

export function getEntry(id: string): CatalogEntry {
  const entry = entries.get(id)
  if (!entry) {
    throw new CatalogError(
      `unknown model ${id}; available: ${[...entries.keys()].sort().join(', ')}`,
    )
  }
  return entry
}

export function listModels(): CatalogEntry[] {
  return [...entries.values()].sort((a, b) => a.id.localeCompare(b.id))
}

function mobilenetEntry(id: string, version: 1 | 2, width: number): CatalogEntry {
  return {
    id,
    penultimateWidth: width,
    source: `@tensorflow-models/mobilenet v${version} alpha 1.0 (downloads weights on first load)`,
    async load(): Promise<FeatureModel> {
      const mobilenet = await import('@tensorflow-models/mobilenet')
      const net = await mobilenet.load({ version, alpha: 1.0 })
      return {
        inputSize: 224,
        embed(batch: tf.Tensor4D): tf.Tensor2D {
          // infer(..., true) returns the pooled features under the head
          return tf.tidy(() => net.infer(batch, true) as tf.Tensor2D)
        },
      }
    },
  }
}

registerModel(mobilenetEntry('mobilenet-v1-100', 1, 1024))
registerModel(mobilenetEntry('mobilenet-v2-100', 2, 1280))
