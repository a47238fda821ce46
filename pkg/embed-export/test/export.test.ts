import * as fs from 'fs';
import * as os from 'os';
import * as path from 'path';
import { PNG } from 'pngjs';
import { afterEach, describe, expect, it, vi } from 'vitest';
import { exportEmbeddings } from '../src/export';
import { loadEmbeddingNetwork } from '../src/network';
import { EMBED_DIM } from '../src/types';

const FIXTURES = path.join(__dirname, '..', 'fixtures');
const MODELS = path.join(FIXTURES, 'models');

function tmpdir(): string {
  return fs.mkdtempSync(path.join(os.tmpdir(), 'embed-export-'));
}

function writePng(file: string, seed: number): void {
  const png = new PNG({ width: 8, height: 8 });
  for (let i = 0; i < 64; i++) {
    const v = (seed * 37 + i * 11) % 256;
    png.data[i * 4] = v;
    png.data[i * 4 + 1] = (v * 2) % 256;
    png.data[i * 4 + 2] = (v * 3) % 256;
    png.data[i * 4 + 3] = 255;
  }
  fs.writeFileSync(file, PNG.sync.write(png));
}

afterEach(() => {
  vi.restoreAllMocks();
});

describe('loadEmbeddingNetwork', () => {
  it('names the expected weight file when weights are missing', async () => {
    const empty = tmpdir();
    await expect(loadEmbeddingNetwork('face', empty)).rejects.toThrow(
      new RegExp(`missing weights.*${path.join(empty, 'face', 'model.json')}`),
    );
  });

  it('rejects layers that do not flatten to the embedding width', async () => {
    await expect(
      loadEmbeddingNetwork('face', MODELS, 'predictions'),
    ).rejects.toThrow(/yields 2 values per frame, not 4096/);
  });

  it('accepts an explicit pooling layer name', async () => {
    const net = await loadEmbeddingNetwork('face', MODELS, 'pool1');
    expect(net.channels).toBe(3);
  });
});

describe('exportEmbeddings', () => {
  it('reproduces the checked-in face fixture byte for byte', async () => {
    const out = path.join(tmpdir(), 'face.csv');
    const summary = await exportEmbeddings({
      inputDir: path.join(FIXTURES, 'inputs', 'face'),
      network: 'face',
      outputPath: out,
      modelsDir: MODELS,
    });
    expect(summary).toEqual({ written: 3, skipped: 0 });
    const got = fs.readFileSync(out);
    const want = fs.readFileSync(path.join(FIXTURES, 'expected', 'face.csv'));
    expect(got.equals(want)).toBe(true);
  });

  it('reproduces the checked-in grid fixture byte for byte', async () => {
    const out = path.join(tmpdir(), 'general.csv');
    const summary = await exportEmbeddings({
      inputDir: path.join(FIXTURES, 'inputs', 'general'),
      network: 'general',
      outputPath: out,
      modelsDir: MODELS,
    });
    expect(summary).toEqual({ written: 2, skipped: 0 });
    const got = fs.readFileSync(out);
    const want = fs.readFileSync(
      path.join(FIXTURES, 'expected', 'general.csv'),
    );
    expect(got.equals(want)).toBe(true);
  });

  it('writes one 4096-value row per frame, ordered by timestamp', async () => {
    const dir = tmpdir();
    for (let i = 0; i < 10; i++) {
      writePng(path.join(dir, `frame_${i}.5.png`), i);
    }
    const out = path.join(tmpdir(), 'emb.csv');
    const summary = await exportEmbeddings({
      inputDir: dir,
      network: 'face',
      outputPath: out,
      modelsDir: MODELS,
    });
    expect(summary.written).toBe(10);
    const lines = fs.readFileSync(out, 'utf8').trim().split('\n');
    expect(lines).toHaveLength(11);
    const times: number[] = [];
    for (const line of lines.slice(1)) {
      const parts = line.split(',');
      expect(parts).toHaveLength(EMBED_DIM + 1);
      times.push(Number(parts[0]));
    }
    expect(times).toEqual([...times].sort((a, b) => a - b));
  });

  it('embeds identical frames identically', async () => {
    const dir = tmpdir();
    writePng(path.join(dir, 'frame_1.png'), 9);
    fs.copyFileSync(
      path.join(dir, 'frame_1.png'),
      path.join(dir, 'frame_2.png'),
    );
    const out = path.join(tmpdir(), 'emb.csv');
    await exportEmbeddings({
      inputDir: dir,
      network: 'face',
      outputPath: out,
      modelsDir: MODELS,
    });
    const [a, b] = fs
      .readFileSync(out, 'utf8')
      .trim()
      .split('\n')
      .slice(1)
      .map((line) => line.slice(line.indexOf(',')));
    expect(a).toBe(b);
  });

  it('skips undecodable inputs with a warning and counts them', async () => {
    const warn = vi.spyOn(console, 'warn').mockImplementation(() => {});
    const dir = tmpdir();
    writePng(path.join(dir, 'frame_1.png'), 1);
    writePng(path.join(dir, 'frame_2.png'), 2);
    fs.writeFileSync(path.join(dir, 'frame_3.png'), 'not a png');
    const out = path.join(tmpdir(), 'emb.csv');
    const summary = await exportEmbeddings({
      inputDir: dir,
      network: 'face',
      outputPath: out,
      modelsDir: MODELS,
    });
    expect(summary).toEqual({ written: 2, skipped: 1 });
    expect(warn).toHaveBeenCalledOnce();
    expect(fs.readFileSync(out, 'utf8').trim().split('\n')).toHaveLength(3);
  });

  it('fails loudly when nothing decodes', async () => {
    vi.spyOn(console, 'warn').mockImplementation(() => {});
    const dir = tmpdir();
    fs.writeFileSync(path.join(dir, 'frame_1.png'), 'junk');
    await expect(
      exportEmbeddings({
        inputDir: dir,
        network: 'face',
        outputPath: path.join(tmpdir(), 'emb.csv'),
        modelsDir: MODELS,
      }),
    ).rejects.toThrow(/no decodable inputs/);
  });
});
