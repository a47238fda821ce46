import * as fs from 'fs';
import * as path from 'path';
import * as tf from '@tensorflow/tfjs';
import { PNG } from 'pngjs';

export interface InputFrame {
  path: string;
  tS: number;
}

const INPUT_EXTS = new Set(['.png', '.csv']);

/**
 * Enumerate the frames of an input directory in time order.
 *
 * Each file's timestamp comes from a numeric suffix on its stem
 * (frame_0.5.png -> 0.5). When any file lacks one, all files fall back
 * to their position in filename order (0, 1, 2, ...), so a directory is
 * always either fully named or fully ordinal.
 */
export function listInputs(dir: string): InputFrame[] {
  const names = fs
    .readdirSync(dir)
    .filter((n) => INPUT_EXTS.has(path.extname(n).toLowerCase()))
    .sort();
  if (names.length === 0) {
    throw new Error(`no .png or .csv inputs in ${dir}`);
  }
  const suffixes = names.map((n) => {
    const stem = n.slice(0, n.lastIndexOf('.'));
    const m = stem.match(/(\d+(?:\.\d+)?)$/);
    return m ? Number(m[1]) : null;
  });
  const allNamed = suffixes.every((s) => s !== null);
  const frames = names.map((n, i) => ({
    path: path.join(dir, n),
    tS: allNamed ? (suffixes[i] as number) : i,
  }));
  frames.sort((a, b) => a.tS - b.tS || (a.path < b.path ? -1 : 1));
  for (let i = 1; i < frames.length; i++) {
    if (frames[i].tS === frames[i - 1].tS) {
      throw new Error(
        `inputs ${path.basename(frames[i - 1].path)} and ` +
          `${path.basename(frames[i].path)} share timestamp ${frames[i].tS}`,
      );
    }
  }
  return frames;
}

function decodePng(buffer: Buffer): tf.Tensor3D {
  const png = PNG.sync.read(buffer);
  const n = png.width * png.height;
  const rgb = new Float32Array(n * 3);
  for (let i = 0; i < n; i++) {
    rgb[i * 3] = png.data[i * 4] / 255;
    rgb[i * 3 + 1] = png.data[i * 4 + 1] / 255;
    rgb[i * 3 + 2] = png.data[i * 4 + 2] / 255;
  }
  return tf.tensor3d(rgb, [png.height, png.width, 3]);
}

function decodeGridCsv(text: string): tf.Tensor3D {
  const rows = text
    .split(/\r?\n/)
    .filter((line) => line.trim().length > 0)
    .map((line) => line.split(',').map(Number));
  const width = rows[0]?.length ?? 0;
  if (width === 0 || rows.some((r) => r.length !== width)) {
    throw new Error('grid is empty or ragged');
  }
  if (rows.some((r) => r.some((v) => !Number.isFinite(v)))) {
    throw new Error('grid holds non-numeric values');
  }
  return tf.tensor3d(rows.flat(), [rows.length, width, 1]);
}

/**
 * Decode one frame to [h, w, c] floats, or null (with a warning) when the
 * file cannot be read as an image or a numeric grid.
 */
export function decodeInput(file: string): tf.Tensor3D | null {
  try {
    if (path.extname(file).toLowerCase() === '.png') {
      return decodePng(fs.readFileSync(file));
    }
    return decodeGridCsv(fs.readFileSync(file, 'utf8'));
  } catch (err) {
    console.warn(
      `skipping undecodable input ${file}: ${(err as Error).message}`,
    );
    return null;
  }
}

/** Resize to 224x224 and match the channel count the network expects. */
export function preprocess(
  frame: tf.Tensor3D,
  channels: number,
): tf.Tensor3D {
  return tf.tidy(() => {
    let x = frame;
    if (x.shape[2] === 1 && channels === 3) {
      x = tf.tile(x, [1, 1, 3]);
    } else if (x.shape[2] === 3 && channels === 1) {
      x = tf.mean(x, 2, true) as tf.Tensor3D;
    } else if (x.shape[2] !== channels) {
      throw new Error(
        `cannot map ${x.shape[2]}-channel input to ${channels} channels`,
      );
    }
    return tf.image.resizeBilinear(x, [224, 224]);
  });
}
