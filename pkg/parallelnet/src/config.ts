export interface ModelConfig {
  vocabSize: number;
  embeddingDim: number;
  gruHidden: number; // per direction; two stacked bidirectional layers
  convFilters: number;
  convBlocks: number; // residual blocks after the entry convolution
  coTrainUnits: number;
  nonSeqDim: number;
  dropout: number;
  learningRate: number;
  learningRateDecay: number; // multiplicative, applied per epoch
  epochs: number;
  seed: number;
}

export const N_QUANTILES = 19;
export const N_TOKENS = 5;

export function toyConfig(partial: Partial<ModelConfig> = {}): ModelConfig {
  return {
    vocabSize: 64,
    embeddingDim: 12,
    gruHidden: 12,
    convFilters: 16,
    convBlocks: 2,
    coTrainUnits: 24,
    nonSeqDim: 0,
    dropout: 0.0,
    learningRate: 0.05,
    learningRateDecay: 0.995,
    epochs: 200,
    seed: 7,
    ...partial,
  };
}

export function validateConfig(config: ModelConfig): void {
  const positive: Array<[string, number]> = [
    ['vocabSize', config.vocabSize],
    ['embeddingDim', config.embeddingDim],
    ['gruHidden', config.gruHidden],
    ['convFilters', config.convFilters],
    ['convBlocks', config.convBlocks],
    ['coTrainUnits', config.coTrainUnits],
    ['learningRate', config.learningRate],
    ['epochs', config.epochs],
  ];
  for (const [name, value] of positive) {
    if (!(value > 0)) throw new Error(`${name} must be positive, got ${value}`);
  }
  if (config.nonSeqDim < 0) throw new Error('nonSeqDim must be >= 0');
  if (!(config.dropout >= 0 && config.dropout < 1)) {
    throw new Error(`dropout must lie in [0, 1), got ${config.dropout}`);
  }
}
