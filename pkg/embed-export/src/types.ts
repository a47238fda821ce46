/** Embedding vectors are always this wide; the consumer rejects others. */
export const EMBED_DIM = 4096;

export type NetworkName = 'general' | 'face';

export interface ExportJob {
  /** Directory of input frames: .png images or .csv value grids. */
  inputDir: string;
  /** Which pretrained network to run. */
  network: NetworkName;
  /** Path of the CSV file to write. */
  outputPath: string;
  /** Directory holding one subdirectory of weights per network. */
  modelsDir: string;
  /**
   * Name of the layer whose (flattened) output is exported. Defaults to
   * the last pooling layer of the network.
   */
  layerName?: string;
}

export interface ExportSummary {
  written: number;
  skipped: number;
}
