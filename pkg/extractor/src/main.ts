/** Minimal runner: npm run extract -- --model <id> --data <dir> --out <file> */

import { listModels } from './catalog'
import { extractEmbeddings } from './extract'

function usage(): never {
  const models = listModels()
    .map(m => `  ${m.id}  (width ${m.penultimateWidth})`)
    .join('\n')
  console.error(
    'usage: node dist/src/main.js --model <id> --data <image-folder> --out <file.tprn>' +
      ' [--batch-size N] [--backend name]\n\nmodels:\n' + models,
  )
  process.exit(2)
}

async function main(): Promise<void> {
  const args = process.argv.slice(2)
  const opts: Record<string, string> = {}
  for (let i = 0; i < args.length; i += 2) {
    if (!args[i].startsWith('--') || args[i + 1] === undefined) usage()
    opts[args[i].slice(2)] = args[i + 1]
  }
  if (!opts.model || !opts.data || !opts.out) usage()
  const summary = await extractEmbeddings({
    model: opts.model,
    dataDir: opts.data,
    outputPath: opts.out,
    batchSize: opts['batch-size'] ? parseInt(opts['batch-size'], 10) : undefined,
    backend: opts.backend,
  })
  console.log(
    `wrote ${summary.outputPath}: N=${summary.samples} D=${summary.width} ` +
      `C=${summary.classes} [${summary.classNames.join(', ')}]`,
  )
}

main().catch(err => {
  console.error(`extraction failed: ${err.message}`)
  process.exit(1)
})
