import fs from 'node:fs';
import path from 'node:path';

import * as tf from '@tensorflow/tfjs';

import { N_QUANTILES } from './config.js';
import { Dataset } from './data.js';
import { predictQuantiles } from './model.js';

const HEADER =
  'shipment_id,' +
  Array.from({ length: N_QUANTILES }, (_, i) => `q${String((i + 1) * 5).padStart(2, '0')}`).join(',');

/** Write the prediction interchange file: one row per shipment, 19
 * stay-length quantiles. Rows are non-decreasing by construction of the
 * output layer, so the downstream loader needs no repairs. */
export function exportPredictions(
  model: tf.LayersModel,
  dataset: Dataset,
  outPath: string,
): number {
  const rows = predictQuantiles(model, dataset.tokens, dataset.nonSeq);
  const lines = [HEADER];
  rows.forEach((row, i) => {
    lines.push(`${dataset.shipmentIds[i]},${row.map((v) => String(v)).join(',')}`);
  });
  fs.mkdirSync(path.dirname(outPath), { recursive: true });
  fs.writeFileSync(outPath, lines.join('\n') + '\n', 'utf-8');
  return rows.length;
}
