import { EMBED_DIM } from './types';

/**
 * Embedding CSV rows: header t_s,e1..e4096, one row per frame, numbers in
 * shortest round-trip decimal form. This is the exact layout the pipeline
 * that consumes these files reads back.
 */
export function embeddingCsv(
  rows: Array<{ tS: number; vector: Float32Array }>,
): string {
  const header = ['t_s'];
  for (let i = 1; i <= EMBED_DIM; i++) {
    header.push(`e${i}`);
  }
  const lines = [header.join(',')];
  for (const row of rows) {
    if (row.vector.length !== EMBED_DIM) {
      throw new Error(
        `row at t_s=${row.tS} has ${row.vector.length} values`,
      );
    }
    const parts = new Array<string>(EMBED_DIM + 1);
    parts[0] = String(row.tS);
    for (let i = 0; i < EMBED_DIM; i++) {
      parts[i + 1] = String(row.vector[i]);
    }
    lines.push(parts.join(','));
  }
  return lines.join('\n') + '\n';
}
