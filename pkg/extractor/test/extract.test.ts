import * as assert from 'node:assert/strict'
import { test } from 'node:test'
import { spawnSync } from 'child_process'
import { mkdtempSync, readFileSync } from 'fs'
import { tmpdir } from 'os'
import * as path from 'path'

import { getEntry, registerModel } from '../src/catalog'
import { extractEmbeddings } from '../src/extract'
import { readTprn } from '../src/tprn'
import { makeImageFolder, testModelEntry, TEST_MODEL_ID, TEST_MODEL_WIDTH } from './fixtures'

registerModel(testModelEntry())

function setup() {
  const root = mkdtempSync(path.join(tmpdir(), 'extract-'))
  makeImageFolder(path.join(root, 'data'), ['bee', 'cat', 'elk'], 4)
  return root
}

test('output matches the dataset and the catalog width', async () => {
  const root = setup()
  const out = path.join(root, 'features.tprn')
  const summary = await extractEmbeddings({
    model: TEST_MODEL_ID,
    dataDir: path.join(root, 'data'),
    outputPath: out,
    batchSize: 5,
  })
  assert.equal(summary.samples, 12) // row count equals image count
  assert.equal(summary.width, TEST_MODEL_WIDTH)
  assert.equal(summary.width, getEntry(TEST_MODEL_ID).penultimateWidth)
  assert.equal(summary.classes, 3)
  const file = readTprn(out)
  assert.equal(file.samples, 12)
  assert.equal(file.width, TEST_MODEL_WIDTH)
  assert.deepEqual([...file.labels], [0, 0, 0, 0, 1, 1, 1, 1, 2, 2, 2, 2])
})

test('two runs over the same files are byte-identical', async () => {
  const root = setup()
  const a = path.join(root, 'a.tprn')
  const b = path.join(root, 'b.tprn')
  for (const out of [a, b]) {
    await extractEmbeddings({
      model: TEST_MODEL_ID,
      dataDir: path.join(root, 'data'),
      outputPath: out,
      batchSize: 3,
    })
  }
  assert.ok(readFileSync(a).equals(readFileSync(b)))
})

test('batch size does not change the bytes', async () => {
  const root = setup()
  const a = path.join(root, 'a.tprn')
  const b = path.join(root, 'b.tprn')
  await extractEmbeddings({
    model: TEST_MODEL_ID, dataDir: path.join(root, 'data'), outputPath: a, batchSize: 1,
  })
  await extractEmbeddings({
    model: TEST_MODEL_ID, dataDir: path.join(root, 'data'), outputPath: b, batchSize: 12,
  })
  assert.ok(readFileSync(a).equals(readFileSync(b)))
})

test('unknown model id has an actionable message', async () => {
  const root = setup()
  await assert.rejects(
    extractEmbeddings({
      model: 'no-such-net',
      dataDir: path.join(root, 'data'),
      outputPath: path.join(root, 'x.tprn'),
    }),
    /unknown model no-such-net; available:/,
  )
})

test('file loads through the reference pipeline loader', async t => {
  const probe = spawnSync('python3', ['-c', 'import topocoreset'], { encoding: 'utf8' })
  if (probe.status !== 0) {
    t.skip('python3 with the topocoreset package is not available')
    return
  }
  const root = setup()
  const out = path.join(root, 'features.tprn')
  await extractEmbeddings({
    model: TEST_MODEL_ID,
    dataDir: path.join(root, 'data'),
    outputPath: out,
  })
  const check = spawnSync(
    'python3',
    [
      '-c',
      'import sys, topocoreset as tc\n' +
        'Z, y = tc.load_embeddings(sys.argv[1])\n' +
        'print(Z.n_samples, Z.dim, y.num_classes, ",".join(map(str, y.labels)))',
      out,
    ],
    { encoding: 'utf8' },
  )
  assert.equal(check.status, 0, check.stderr)
  const [n, d, c, labels] = check.stdout.trim().split(' ')
  assert.equal(n, '12')
  assert.equal(d, String(TEST_MODEL_WIDTH))
  assert.equal(c, '3')
  assert.equal(labels, '0,0,0,0,1,1,1,1,2,2,2,2')
})

test('pretrained catalog model end to end', { skip: !process.env.EXTRACTOR_REAL_MODEL }, async () => {
  // needs network access for the weight download; run with
  // EXTRACTOR_REAL_MODEL=1 npm test
  const root = setup()
  const out = path.join(root, 'real.tprn')
  const summary = await extractEmbeddings({
    model: 'mobilenet-v2-100',
    dataDir: path.join(root, 'data'),
    outputPath: out,
    batchSize: 4,
  })
  assert.equal(summary.width, 1280)
  assert.equal(readTprn(out).samples, 12)
})
