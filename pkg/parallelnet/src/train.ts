import * as tf from '@tensorflow/tfjs';

import { ModelConfig, N_TOKENS } from './config.js';
import { Dataset } from './data.js';

export interface TrainResult {
  lossCurve: number[];
  finalLoss: number;
}

/** Mean squared logarithmic error over the 19 quantile outputs. */
export function msle(yTrue: tf.Tensor, yPred: tf.Tensor): tf.Scalar {
  return tf.tidy(() => tf.mean(tf.square(tf.sub(tf.log1p(yTrue), tf.log1p(yPred)))) as tf.Scalar);
}

/** Full-batch training with Adam and per-epoch learning-rate decay.
 * Deterministic given the config seed (weight init, dropout masks). */
export async function train(
  model: tf.LayersModel,
  dataset: Dataset,
  config: ModelConfig,
): Promise<TrainResult> {
  const n = dataset.targets.length;
  if (n === 0) throw new Error('empty training set');
  const xs = [
    tf.tensor2d(dataset.tokens, [n, N_TOKENS], 'int32'),
    tf.tensor2d(dataset.nonSeq),
  ];
  const ys = tf.tensor2d(dataset.targets);
  const optimizer = tf.train.adam(config.learningRate);

  const lossCurve: number[] = [];
  try {
    for (let epoch = 0; epoch < config.epochs; epoch++) {
      const loss = optimizer.minimize(
        () => msle(ys, model.apply(xs, { training: true }) as tf.Tensor),
        true,
      ) as tf.Scalar;
      const value = (await loss.data())[0];
      loss.dispose();
      if (!Number.isFinite(value)) {
        throw new Error(
          `loss became ${value} at epoch ${epoch} (lr ${config.learningRate}, ` +
            `last finite loss ${lossCurve.at(-1) ?? 'none'})`,
        );
      }
      lossCurve.push(value);
      // eslint-disable-next-line @typescript-eslint/no-explicit-any
      (optimizer as any).learningRate *= config.learningRateDecay;
    }
  } finally {
    xs.forEach((x) => x.dispose());
    ys.dispose();
    optimizer.dispose();
  }
  return { lossCurve, finalLoss: lossCurve[lossCurve.length - 1] };
}

/** Training MSLE of the current weights (no dropout). */
export function evaluateMsle(model: tf.LayersModel, dataset: Dataset): number {
  return tf.tidy(() => {
    const xs = [
      tf.tensor2d(dataset.tokens, [dataset.tokens.length, N_TOKENS], 'int32'),
      tf.tensor2d(dataset.nonSeq),
    ];
    const ys = tf.tensor2d(dataset.targets);
    return msle(ys, model.predict(xs) as tf.Tensor).dataSync()[0];
  });
}

export function smoothed(curve: number[], window: number): number[] {
  const out: number[] = [];
  for (let i = 0; i + window <= curve.length; i++) {
    out.push(curve.slice(i, i + window).reduce((a, b) => a + b, 0) / window);
  }
  return out;
}
