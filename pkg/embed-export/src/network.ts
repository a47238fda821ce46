import * as fs from 'fs';
import * as tf from '@tensorflow/tfjs';
import { dirLoadHandler, modelJsonPath } from './modelio';
import { EMBED_DIM, NetworkName } from './types';

export interface EmbeddingNetwork {
  /** Truncated model mapping [n, 224, 224, c] to [n, EMBED_DIM]. */
  model: tf.LayersModel;
  /** Channel count the network expects. */
  channels: number;
}

function flatSize(shape: Array<number | null>): number {
  return shape.slice(1).reduce((a: number, b) => a * (b ?? 1), 1);
}

/**
 * Load one of the pretrained networks and truncate it at the embedding
 * layer: the named layer when given, the last pooling layer otherwise.
 * Throws with the expected weight-file path when the weights are absent.
 */
export async function loadEmbeddingNetwork(
  network: NetworkName,
  modelsDir: string,
  layerName?: string,
): Promise<EmbeddingNetwork> {
  const dir = `${modelsDir}/${network}`;
  if (!fs.existsSync(modelJsonPath(dir))) {
    throw new Error(
      `missing weights for network "${network}": expected ` +
        `${modelJsonPath(dir)} (a layers-model directory with its ` +
        `weight shards); pass --models-dir if the weights live elsewhere`,
    );
  }
  const full = await tf.loadLayersModel(dirLoadHandler(dir));
  let layer: tf.layers.Layer;
  if (layerName) {
    layer = full.getLayer(layerName);
  } else {
    const pooling = full.layers.filter((l) =>
      /pooling/i.test(l.getClassName()),
    );
    if (pooling.length === 0) {
      throw new Error(
        `network "${network}" has no pooling layer; pass --layer to pick ` +
          'the embedding layer explicitly',
      );
    }
    layer = pooling[pooling.length - 1];
  }
  const out = layer.output as tf.SymbolicTensor;
  const size = flatSize(out.shape);
  if (size !== EMBED_DIM) {
    throw new Error(
      `layer "${layer.name}" of network "${network}" yields ${size} ` +
        `values per frame, not ${EMBED_DIM}; pick another layer with --layer`,
    );
  }
  const truncated = tf.model({ inputs: full.inputs, outputs: out });
  const inputShape = full.inputs[0].shape;
  return { model: truncated, channels: inputShape[3] ?? 1 };
}

/** Flattened embedding of one preprocessed [224, 224, c] frame. */
export function embedFrame(
  net: EmbeddingNetwork,
  frame: tf.Tensor3D,
): Float32Array {
  return tf.tidy(() => {
    const batched = frame.expandDims(0);
    const out = net.model.predict(batched) as tf.Tensor;
    return out.reshape([EMBED_DIM]).dataSync() as Float32Array;
  });
}
