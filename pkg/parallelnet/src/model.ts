import * as tf from '@tensorflow/tfjs';

import { ModelConfig, N_QUANTILES, N_TOKENS, validateConfig } from './config.js';

export type ArmSelection = 'both' | 'gru' | 'conv';

/** Two arms over the same inputs, joined by a co-training layer.
 *
 * The recurrent arm stacks two bidirectional GRU layers over the token
 * embedding; the convolutional arm stacks residual conv blocks with
 * dropout. Both concatenate the non-sequential features before their arm
 * head. The output layer emits 19 non-decreasing stay-length quantiles:
 * each of 19 single-unit ReLU layers predicts the increment over the
 * previous quantile, so monotonicity holds for every weight setting.
 *
 * `arms` restricts the network to a single arm for comparison runs.
 */
export function buildModel(config: ModelConfig, arms: ArmSelection = 'both'): tf.LayersModel {
  validateConfig(config);
  let seed = config.seed;
  const init = () => tf.initializers.glorotUniform({ seed: seed++ });

  const tokens = tf.input({ shape: [N_TOKENS], dtype: 'int32', name: 'tokens' });
  const nonSeq = tf.input({ shape: [config.nonSeqDim], name: 'nonseq' });

  const embedded = tf.layers
    .embedding({
      inputDim: config.vocabSize,
      outputDim: config.embeddingDim,
      embeddingsInitializer: init(),
      name: 'embedding',
    })
    .apply(tokens) as tf.SymbolicTensor;

  const armOutputs: tf.SymbolicTensor[] = [];

  if (arms !== 'conv') {
    const gruOptions = (returnSequences: boolean) => ({
      units: config.gruHidden,
      returnSequences,
      kernelInitializer: init(),
      recurrentInitializer: init(),
      seed: seed++,
    });
    let recurrent = tf.layers
      .bidirectional({ layer: tf.layers.gru(gruOptions(true)), mergeMode: 'concat', name: 'bigru_1' })
      .apply(embedded) as tf.SymbolicTensor;
    recurrent = tf.layers
      .bidirectional({ layer: tf.layers.gru(gruOptions(false)), mergeMode: 'concat', name: 'bigru_2' })
      .apply(recurrent) as tf.SymbolicTensor;
    armOutputs.push(
      tf.layers
        .dense({ units: config.coTrainUnits, activation: 'relu', kernelInitializer: init(), name: 'gru_arm' })
        .apply(tf.layers.concatenate().apply([recurrent, nonSeq]) as tf.SymbolicTensor) as tf.SymbolicTensor,
    );
  }

  if (arms !== 'gru') {
    let conv = tf.layers
      .conv1d({
        filters: config.convFilters,
        kernelSize: 3,
        padding: 'same',
        activation: 'relu',
        kernelInitializer: init(),
        name: 'conv_in',
      })
      .apply(embedded) as tf.SymbolicTensor;
    for (let block = 0; block < config.convBlocks; block++) {
      let inner = tf.layers
        .conv1d({
          filters: config.convFilters,
          kernelSize: 3,
          padding: 'same',
          activation: 'relu',
          kernelInitializer: init(),
          name: `conv_block_${block}`,
        })
        .apply(conv) as tf.SymbolicTensor;
      if (config.dropout > 0) {
        inner = tf.layers
          .dropout({ rate: config.dropout, seed: seed++, name: `conv_dropout_${block}` })
          .apply(inner) as tf.SymbolicTensor;
      }
      conv = tf.layers.add({ name: `conv_skip_${block}` }).apply([conv, inner]) as tf.SymbolicTensor;
    }
    const pooled = tf.layers.globalAveragePooling1d({ name: 'conv_pool' }).apply(conv) as tf.SymbolicTensor;
    armOutputs.push(
      tf.layers
        .dense({ units: config.coTrainUnits, activation: 'relu', kernelInitializer: init(), name: 'conv_arm' })
        .apply(tf.layers.concatenate().apply([pooled, nonSeq]) as tf.SymbolicTensor) as tf.SymbolicTensor,
    );
  }

  // co-training layer over the arms (not an average of two heads)
  const joint =
    armOutputs.length > 1
      ? (tf.layers.concatenate({ name: 'arm_concat' }).apply(armOutputs) as tf.SymbolicTensor)
      : armOutputs[0];
  const base = tf.layers
    .dense({ units: config.coTrainUnits, activation: 'relu', kernelInitializer: init(), name: 'co_train' })
    .apply(joint) as tf.SymbolicTensor;

  // residual quantile head
  let running = tf.layers
    .dense({ units: 1, activation: 'relu', kernelInitializer: init(), name: 'q_inc_0' })
    .apply(base) as tf.SymbolicTensor;
  const levels: tf.SymbolicTensor[] = [running];
  for (let i = 1; i < N_QUANTILES; i++) {
    const increment = tf.layers
      .dense({ units: 1, activation: 'relu', kernelInitializer: init(), name: `q_inc_${i}` })
      .apply(base) as tf.SymbolicTensor;
    running = tf.layers.add({ name: `q_level_${i}` }).apply([running, increment]) as tf.SymbolicTensor;
    levels.push(running);
  }
  const output = tf.layers.concatenate({ name: 'quantiles' }).apply(levels) as tf.SymbolicTensor;

  return tf.model({ inputs: [tokens, nonSeq], outputs: output, name: 'parallel_quantile_net' });
}

/** Zero the co-training weights fed by the convolutional arm, reducing the
 * network to a GRU-only predictor with the remaining weights intact. */
export function zeroConvContribution(model: tf.LayersModel): void {
  const coTrain = model.getLayer('co_train');
  const [kernel, bias] = coTrain.getWeights();
  const units = kernel.shape[0]! / 2; // rows: [gru arm | conv arm]
  const gruRows = tf.slice(kernel, [0, 0], [units, kernel.shape[1]!]);
  const zeros = tf.zerosLike(tf.slice(kernel, [units, 0], [units, kernel.shape[1]!]));
  coTrain.setWeights([tf.concat([gruRows, zeros], 0), bias]);
}

export function randomizeWeights(model: tf.LayersModel, seed: number): void {
  let s = seed;
  const fresh = model.getWeights().map((w) => tf.randomUniform(w.shape, -2, 2, 'float32', s++));
  model.setWeights(fresh);
}

export function predictQuantiles(
  model: tf.LayersModel,
  tokens: number[][],
  nonSeq: number[][],
): number[][] {
  return tf.tidy(() => {
    const xs = [tf.tensor2d(tokens, [tokens.length, N_TOKENS], 'int32'), tf.tensor2d(nonSeq)];
    const out = model.predict(xs) as tf.Tensor2D;
    return out.arraySync();
  });
}
