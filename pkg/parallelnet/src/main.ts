import path from 'node:path';
import { parseArgs } from 'node:util';

import { toyConfig } from './config.js';
import { buildEncoder, encodeDataset, loadManifest } from './data.js';
import { exportPredictions } from './export.js';
import { buildModel } from './model.js';
import { evaluateMsle, train } from './train.js';

async function main(): Promise<number> {
  const { values } = parseArgs({
    options: {
      train: { type: 'string' },
      predict: { type: 'string' },
      out: { type: 'string', default: path.join('out', 'predictions.csv') },
      epochs: { type: 'string', default: '200' },
      seed: { type: 'string', default: '7' },
      'learning-rate': { type: 'string', default: '0.05' },
    },
  });
  if (!values.train) {
    console.error(
      'usage: node dist/main.js --train <manifest.csv> [--predict <manifest.csv>] ' +
        '[--out out/predictions.csv] [--epochs N] [--seed N] [--learning-rate X]',
    );
    return 2;
  }

  const trainShipments = loadManifest(values.train);
  const encoder = buildEncoder(trainShipments);
  const trainSet = encodeDataset(trainShipments, encoder);
  const config = toyConfig({
    vocabSize: Math.max(encoder.vocab.size, 2),
    nonSeqDim: encoder.nonSeqDim,
    epochs: Number(values.epochs),
    seed: Number(values.seed),
    learningRate: Number(values['learning-rate']),
  });

  console.log(
    `training on ${trainShipments.length} shipments ` +
      `(vocab ${config.vocabSize}, ${config.epochs} epochs, seed ${config.seed})`,
  );
  const model = buildModel(config);
  const result = await train(model, trainSet, config);
  console.log(
    `final training MSLE ${result.finalLoss.toFixed(6)} ` +
      `(clean forward pass: ${evaluateMsle(model, trainSet).toFixed(6)})`,
  );

  const target = values.predict ? loadManifest(values.predict) : trainShipments;
  const targetSet = encodeDataset(target, encoder);
  const written = exportPredictions(model, targetSet, values.out);
  console.log(`wrote ${written} predictions -> ${values.out}`);
  return 0;
}

main().then(
  (code) => process.exit(code),
  (err) => {
    console.error(err);
    process.exit(1);
  },
);
