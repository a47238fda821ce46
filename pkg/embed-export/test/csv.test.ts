import { describe, expect, it } from 'vitest';
import { embeddingCsv } from '../src/csv';
import { EMBED_DIM } from '../src/types';

function row(tS: number, fill: number) {
  return { tS, vector: new Float32Array(EMBED_DIM).fill(fill) };
}

describe('embeddingCsv', () => {
  it('writes the t_s,e1..e4096 header', () => {
    const header = embeddingCsv([row(0, 0)]).split('\n')[0].split(',');
    expect(header).toHaveLength(EMBED_DIM + 1);
    expect(header[0]).toBe('t_s');
    expect(header[1]).toBe('e1');
    expect(header[EMBED_DIM]).toBe(`e${EMBED_DIM}`);
  });

  it('writes one line per row plus a trailing newline', () => {
    const text = embeddingCsv([row(0.5, 1), row(1.5, 2)]);
    expect(text.endsWith('\n')).toBe(true);
    expect(text.slice(0, -1).split('\n')).toHaveLength(3);
  });

  it('round-trips every value through Number()', () => {
    const vector = new Float32Array(EMBED_DIM);
    for (let i = 0; i < EMBED_DIM; i++) {
      vector[i] = Math.sin(i) * 10 ** ((i % 7) - 3);
    }
    const line = embeddingCsv([{ tS: 2.5, vector }])
      .split('\n')[1]
      .split(',');
    expect(Number(line[0])).toBe(2.5);
    for (let i = 0; i < EMBED_DIM; i++) {
      expect(Number(line[i + 1])).toBe(vector[i]);
    }
  });

  it('rejects vectors of the wrong width', () => {
    expect(() =>
      embeddingCsv([{ tS: 0, vector: new Float32Array(10) }]),
    ).toThrow(/10 values/);
  });
});
