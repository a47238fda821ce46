#!/usr/bin/env node
import yargs from 'yargs';
import { hideBin } from 'yargs/helpers';
import { exportEmbeddings } from './export';
import { NetworkName } from './types';

async function run(): Promise<void> {
  const argv = await yargs(hideBin(process.argv))
    .usage('embed-export --network face --in frames/ --out emb.csv')
    .option('network', {
      choices: ['general', 'face'] as const,
      demandOption: true,
      describe: 'which pretrained embedding network to run',
    })
    .option('in', {
      type: 'string',
      demandOption: true,
      describe: 'directory of .png frames or .csv grids',
    })
    .option('out', {
      type: 'string',
      demandOption: true,
      describe: 'embedding CSV file to write',
    })
    .option('models-dir', {
      type: 'string',
      default: 'models',
      describe: 'directory holding one weights subdirectory per network',
    })
    .option('layer', {
      type: 'string',
      describe: 'embedding layer name (default: last pooling layer)',
    })
    .strict()
    .parse();

  const summary = await exportEmbeddings({
    inputDir: argv.in,
    network: argv.network as NetworkName,
    outputPath: argv.out,
    modelsDir: argv['models-dir'],
    layerName: argv.layer,
  });
  console.log(
    `wrote ${summary.written} rows to ${argv.out}` +
      (summary.skipped > 0 ? ` (${summary.skipped} inputs skipped)` : ''),
  );
}

run().catch((err: Error) => {
  console.error(`error: ${err.message}`);
  process.exitCode = 1;
});
