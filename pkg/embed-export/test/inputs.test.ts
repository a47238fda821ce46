import * as fs from 'fs';
import * as os from 'os';
import * as path from 'path';
import { PNG } from 'pngjs';
import { afterEach, describe, expect, it, vi } from 'vitest';
import { decodeInput, listInputs, preprocess } from '../src/inputs';

function tmpdir(): string {
  return fs.mkdtempSync(path.join(os.tmpdir(), 'embed-export-'));
}

function touch(dir: string, name: string, content = 'x'): void {
  fs.writeFileSync(path.join(dir, name), content);
}

function pngBytes(size: number, value: number): Buffer {
  const png = new PNG({ width: size, height: size });
  for (let i = 0; i < size * size; i++) {
    png.data[i * 4] = value;
    png.data[i * 4 + 1] = 2 * value;
    png.data[i * 4 + 2] = 3 * value;
    png.data[i * 4 + 3] = 255;
  }
  return PNG.sync.write(png);
}

afterEach(() => {
  vi.restoreAllMocks();
});

describe('listInputs', () => {
  it('orders by the numeric filename suffix, not lexicographically', () => {
    const dir = tmpdir();
    touch(dir, 'frame_10.png');
    touch(dir, 'frame_2.png');
    touch(dir, 'frame_0.5.png');
    const frames = listInputs(dir);
    expect(frames.map((f) => f.tS)).toEqual([0.5, 2, 10]);
    expect(path.basename(frames[1].path)).toBe('frame_2.png');
  });

  it('falls back to ordinal timestamps when any name lacks one', () => {
    const dir = tmpdir();
    touch(dir, 'b_3.csv');
    touch(dir, 'apple.csv');
    const frames = listInputs(dir);
    expect(frames.map((f) => f.tS)).toEqual([0, 1]);
    expect(path.basename(frames[0].path)).toBe('apple.csv');
  });

  it('ignores other extensions and rejects an inputless directory', () => {
    const dir = tmpdir();
    touch(dir, 'notes.txt');
    expect(() => listInputs(dir)).toThrow(/no .png or .csv inputs/);
  });

  it('rejects duplicate timestamps', () => {
    const dir = tmpdir();
    touch(dir, 'a_1.png');
    touch(dir, 'b_1.png');
    expect(() => listInputs(dir)).toThrow(/share timestamp 1/);
  });
});

describe('decodeInput', () => {
  it('decodes a png to [h, w, 3] floats in [0, 1]', () => {
    const dir = tmpdir();
    fs.writeFileSync(path.join(dir, 'f_0.png'), pngBytes(4, 50));
    const t = decodeInput(path.join(dir, 'f_0.png'));
    expect(t).not.toBeNull();
    expect(t!.shape).toEqual([4, 4, 3]);
    const values = t!.dataSync();
    expect(values[0]).toBeCloseTo(50 / 255, 6);
    expect(values[1]).toBeCloseTo(100 / 255, 6);
    expect(Math.max(...values)).toBeLessThanOrEqual(1);
  });

  it('decodes a csv grid to [h, w, 1]', () => {
    const dir = tmpdir();
    touch(dir, 'g_0.csv', '0.1,0.2\n0.3,0.4\n');
    const t = decodeInput(path.join(dir, 'g_0.csv'));
    expect(t!.shape).toEqual([2, 2, 1]);
    expect(Array.from(t!.dataSync())).toEqual([
      0.1, 0.2, 0.3, 0.4,
    ].map(Math.fround));
  });

  it('returns null with a warning for a corrupt png', () => {
    const warn = vi.spyOn(console, 'warn').mockImplementation(() => {});
    const dir = tmpdir();
    touch(dir, 'bad_0.png', 'this is not a png');
    expect(decodeInput(path.join(dir, 'bad_0.png'))).toBeNull();
    expect(warn).toHaveBeenCalledOnce();
  });

  it('returns null with a warning for a ragged or non-numeric grid', () => {
    const warn = vi.spyOn(console, 'warn').mockImplementation(() => {});
    const dir = tmpdir();
    touch(dir, 'ragged_0.csv', '1,2\n3\n');
    touch(dir, 'words_1.csv', '1,2\n3,dog\n');
    expect(decodeInput(path.join(dir, 'ragged_0.csv'))).toBeNull();
    expect(decodeInput(path.join(dir, 'words_1.csv'))).toBeNull();
    expect(warn).toHaveBeenCalledTimes(2);
  });
});

describe('preprocess', () => {
  it('tiles single-channel grids for three-channel networks', () => {
    const dir = tmpdir();
    touch(dir, 'g_0.csv', '0.5,0.5\n0.5,0.5\n');
    const t = decodeInput(path.join(dir, 'g_0.csv'))!;
    const out = preprocess(t, 3);
    expect(out.shape).toEqual([224, 224, 3]);
    expect(out.dataSync()[0]).toBeCloseTo(0.5, 6);
  });

  it('averages rgb down to one channel', () => {
    const dir = tmpdir();
    fs.writeFileSync(path.join(dir, 'f_0.png'), pngBytes(4, 60));
    const t = decodeInput(path.join(dir, 'f_0.png'))!;
    const out = preprocess(t, 1);
    expect(out.shape).toEqual([224, 224, 1]);
    expect(out.dataSync()[0]).toBeCloseTo((60 + 120 + 180) / 3 / 255, 6);
  });
});
