/**
 * Filesystem load/save for layers-model directories (model.json plus
 * binary weight shards). The plain tfjs package ships without Node file
 * handlers, so these small ones stand in for them.
 */

import * as fs from 'fs';
import * as path from 'path';
import * as tf from '@tensorflow/tfjs';

export function modelJsonPath(dir: string): string {
  return path.join(dir, 'model.json');
}

/** IOHandler that reads a model.json and its weight shards from a directory. */
export function dirLoadHandler(dir: string): tf.io.IOHandler {
  return {
    load: async () => {
      const doc = JSON.parse(
        fs.readFileSync(modelJsonPath(dir), 'utf8'),
      );
      const weightSpecs: tf.io.WeightsManifestEntry[] = [];
      const shards: Buffer[] = [];
      for (const group of doc.weightsManifest) {
        weightSpecs.push(...group.weights);
        for (const p of group.paths) {
          shards.push(fs.readFileSync(path.join(dir, p)));
        }
      }
      const blob = Buffer.concat(shards);
      const weightData = blob.buffer.slice(
        blob.byteOffset,
        blob.byteOffset + blob.byteLength,
      );
      return {
        modelTopology: doc.modelTopology,
        weightSpecs,
        weightData,
      };
    },
  };
}

/** IOHandler that writes model.json plus a single weights.bin shard. */
export function dirSaveHandler(dir: string): tf.io.IOHandler {
  return {
    save: async (artifacts: tf.io.ModelArtifacts) => {
      fs.mkdirSync(dir, { recursive: true });
      const doc = {
        modelTopology: artifacts.modelTopology,
        format: 'layers-model',
        generatedBy: `TensorFlow.js v${tf.version.tfjs}`,
        convertedBy: null,
        weightsManifest: [
          { paths: ['weights.bin'], weights: artifacts.weightSpecs },
        ],
      };
      fs.writeFileSync(modelJsonPath(dir), JSON.stringify(doc));
      fs.writeFileSync(
        path.join(dir, 'weights.bin'),
        Buffer.from(artifacts.weightData as ArrayBuffer),
      );
      return {
        modelArtifactsInfo: {
          dateSaved: new Date(),
          modelTopologyType: 'JSON',
        },
      };
    },
  };
}
