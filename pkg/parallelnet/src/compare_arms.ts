/** Optional comparison run: co-trained parallel model vs each single arm
 * vs a plain prediction-averaging ensemble of the two arms.
 *
 *     npm run build && node dist/compare_arms.js [manifest.csv]
 */

import path from 'node:path';

import { toyConfig } from './config.js';
import { buildEncoder, encodeDataset, loadManifest } from './data.js';
import { buildModel, predictQuantiles } from './model.js';
import { evaluateMsle, train } from './train.js';

async function main(): Promise<void> {
  const manifest = process.argv[2] ?? path.join('fixtures', 'train.csv');
  const shipments = loadManifest(manifest);
  const enc = buildEncoder(shipments);
  const ds = encodeDataset(shipments, enc);
  const config = toyConfig({
    vocabSize: enc.vocab.size,
    nonSeqDim: enc.nonSeqDim,
    epochs: 100,
    seed: 5,
  });

  const results: Record<string, number> = {};
  const singleArmRows: number[][][] = [];
  for (const arms of ['both', 'gru', 'conv'] as const) {
    const model = buildModel(config, arms);
    await train(model, ds, config);
    results[arms === 'both' ? 'parallel' : arms] = evaluateMsle(model, ds);
    if (arms !== 'both') {
      singleArmRows.push(predictQuantiles(model, ds.tokens, ds.nonSeq));
    }
  }

  // plain ensemble: average the two single-arm predictions
  const [gruRows, convRows] = singleArmRows;
  let total = 0;
  let count = 0;
  gruRows.forEach((row, i) => {
    row.forEach((v, j) => {
      const averaged = (v + convRows[i][j]) / 2;
      const diff = Math.log1p(ds.targets[i][j]) - Math.log1p(Math.max(0, averaged));
      total += diff * diff;
      count += 1;
    });
  });
  results['ensemble_avg'] = total / count;

  console.log(`training MSLE on ${shipments.length} shipments (${config.epochs} epochs):`);
  for (const [name, value] of Object.entries(results)) {
    console.log(`  ${name.padEnd(12)} ${value.toFixed(6)}`);
  }
}

main().catch((err) => {
  console.error(err);
  process.exit(1);
});
