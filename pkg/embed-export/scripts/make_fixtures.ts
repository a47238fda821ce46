/**
 * Regenerate everything under fixtures/: two tiny seeded networks with the
 * real topology shape (conv, pooling to 4096 flattened values, classifier
 * head), a handful of input frames, and the expected export CSVs. The test
 * suite replays the export and compares bytes, so rerun this only when the
 * export format intentionally changes.
 */

import * as fs from 'fs';
import * as path from 'path';
import * as tf from '@tensorflow/tfjs';
import { PNG } from 'pngjs';
import { dirSaveHandler } from '../src/modelio';
import { exportEmbeddings } from '../src/export';

const FIXTURES = path.join(__dirname, '..', 'fixtures');

/** Small deterministic PRNG so fixtures never depend on library RNG. */
function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

function seededWeights(model: tf.LayersModel, seed: number): void {
  const rand = mulberry32(seed);
  const fresh = model.getWeights().map((w) => {
    const values = new Float32Array(w.size);
    for (let i = 0; i < values.length; i++) {
      values[i] = (rand() - 0.5) * 0.2;
    }
    return tf.tensor(values, w.shape);
  });
  model.setWeights(fresh);
}

function tinyNetwork(channels: number, seed: number): tf.LayersModel {
  const model = tf.sequential({
    layers: [
      tf.layers.conv2d({
        inputShape: [224, 224, channels],
        filters: 4,
        kernelSize: 3,
        padding: 'same',
        activation: 'relu',
        name: 'conv1',
      }),
      // 224/7 = 32, so the flattened pool output is 32*32*4 = 4096
      tf.layers.maxPooling2d({ poolSize: 7, strides: 7, name: 'pool1' }),
      tf.layers.flatten({ name: 'flatten' }),
      tf.layers.dense({ units: 2, activation: 'softmax', name: 'predictions' }),
    ],
  });
  seededWeights(model, seed);
  return model;
}

function writePng(file: string, size: number, seed: number): void {
  const rand = mulberry32(seed);
  const png = new PNG({ width: size, height: size });
  for (let i = 0; i < size * size; i++) {
    png.data[i * 4] = Math.floor(rand() * 256);
    png.data[i * 4 + 1] = Math.floor(rand() * 256);
    png.data[i * 4 + 2] = Math.floor(rand() * 256);
    png.data[i * 4 + 3] = 255;
  }
  fs.writeFileSync(file, PNG.sync.write(png));
}

function writeGrid(file: string, size: number, seed: number): void {
  const rand = mulberry32(seed);
  const lines: string[] = [];
  for (let r = 0; r < size; r++) {
    const row: string[] = [];
    for (let c = 0; c < size; c++) {
      row.push((Math.round(rand() * 10000) / 10000).toString());
    }
    lines.push(row.join(','));
  }
  fs.writeFileSync(file, lines.join('\n') + '\n');
}

async function main(): Promise<void> {
  fs.rmSync(FIXTURES, { recursive: true, force: true });

  await tinyNetwork(3, 11).save(
    dirSaveHandler(path.join(FIXTURES, 'models', 'face')),
  );
  await tinyNetwork(1, 22).save(
    dirSaveHandler(path.join(FIXTURES, 'models', 'general')),
  );

  const faceDir = path.join(FIXTURES, 'inputs', 'face');
  fs.mkdirSync(faceDir, { recursive: true });
  writePng(path.join(faceDir, 'frame_0.5.png'), 16, 1);
  writePng(path.join(faceDir, 'frame_1.5.png'), 16, 2);
  writePng(path.join(faceDir, 'frame_2.5.png'), 16, 3);

  const generalDir = path.join(FIXTURES, 'inputs', 'general');
  fs.mkdirSync(generalDir, { recursive: true });
  writeGrid(path.join(generalDir, 'map_1.csv'), 8, 4);
  writeGrid(path.join(generalDir, 'map_2.csv'), 8, 5);

  const modelsDir = path.join(FIXTURES, 'models');
  const expectedDir = path.join(FIXTURES, 'expected');
  for (const network of ['face', 'general'] as const) {
    const summary = await exportEmbeddings({
      inputDir: path.join(FIXTURES, 'inputs', network),
      network,
      outputPath: path.join(expectedDir, `${network}.csv`),
      modelsDir,
    });
    console.log(`${network}: ${summary.written} rows`);
  }
}

main().catch((err) => {
  console.error(err);
  process.exitCode = 1;
});
