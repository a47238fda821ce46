import * as fs from 'fs';
import * as path from 'path';
import { embeddingCsv } from './csv';
import { decodeInput, listInputs, preprocess } from './inputs';
import { embedFrame, loadEmbeddingNetwork } from './network';
import { ExportJob, ExportSummary } from './types';

export { EMBED_DIM, ExportJob, ExportSummary, NetworkName } from './types';
export { loadEmbeddingNetwork } from './network';
export { listInputs } from './inputs';
export { embeddingCsv } from './csv';

/**
 * Run the selected network over every decodable frame in the input
 * directory and write one embedding row per frame, ordered by timestamp.
 */
export async function exportEmbeddings(
  job: ExportJob,
): Promise<ExportSummary> {
  const net = await loadEmbeddingNetwork(
    job.network,
    job.modelsDir,
    job.layerName,
  );
  const rows: Array<{ tS: number; vector: Float32Array }> = [];
  let skipped = 0;
  for (const frame of listInputs(job.inputDir)) {
    const decoded = decodeInput(frame.path);
    if (decoded === null) {
      skipped++;
      continue;
    }
    const prepared = preprocess(decoded, net.channels);
    decoded.dispose();
    rows.push({ tS: frame.tS, vector: embedFrame(net, prepared) });
    prepared.dispose();
  }
  if (rows.length === 0) {
    throw new Error(`no decodable inputs in ${job.inputDir}`);
  }
  fs.mkdirSync(path.dirname(path.resolve(job.outputPath)), {
    recursive: true,
  });
  fs.writeFileSync(job.outputPath, embeddingCsv(rows));
  return { written: rows.length, skipped };
}
