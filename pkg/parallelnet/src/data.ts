import fs from 'node:fs';
import Papa from 'papaparse';

import { N_QUANTILES, N_TOKENS } from './config.js';

export const PAD_TOKEN = '';
export const PAD_ID = 0;
export const UNK_ID = 1;

export interface ManifestShipment {
  shipmentId: string;
  arrivalDate: string; // ISO date
  warehouseId: string;
  customerType: string;
  productGroup: string;
  palletWeight: number;
  description: string;
  tokens: string[]; // as written by the upstream tooling
  target: number[]; // 19 stay-length quantiles
}

const QUANTILE_COLUMNS = Array.from({ length: N_QUANTILES }, (_, i) => {
  const level = (i + 1) * 5;
  return `q${String(level).padStart(2, '0')}`;
});

/** Lowercase, split on whitespace, first five tokens, pad with the null
 * token. Must match the upstream tokenizer exactly: word order carries
 * meaning in these abbreviated descriptions. */
export function tokenize(description: string): string[] {
  const tokens = description.toLowerCase().split(/\s+/).filter((t) => t.length > 0).slice(0, N_TOKENS);
  while (tokens.length < N_TOKENS) tokens.push(PAD_TOKEN);
  return tokens;
}

export function loadManifest(path: string): ManifestShipment[] {
  const raw = fs.readFileSync(path, 'utf-8');
  const parsed = Papa.parse<Record<string, string>>(raw, {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0];
    throw new Error(`manifest parse error at row ${first.row}: ${first.message}`);
  }
  return parsed.data.map((row, i) => {
    for (const column of ['shipment_id', 'description', 'tokens', ...QUANTILE_COLUMNS]) {
      if (!(column in row)) throw new Error(`manifest missing column ${column}`);
    }
    const target = QUANTILE_COLUMNS.map((c) => Number(row[c]));
    if (target.some((v) => !Number.isFinite(v) || v < 0)) {
      throw new Error(`bad target quantiles in row ${i + 2}`);
    }
    return {
      shipmentId: row['shipment_id'],
      arrivalDate: row['arrival_date'],
      warehouseId: row['warehouse_id'],
      customerType: row['customer_type'],
      productGroup: row['product_group'],
      palletWeight: Number(row['pallet_weight']),
      description: row['description'],
      tokens: row['tokens'].split('|'),
      target,
    };
  });
}

export interface Vocab {
  idOf: Map<string, number>;
  size: number;
}

/** Token vocabulary from the training manifest; 0 is the pad, 1 the
 * unknown-token bucket for anything unseen at prediction time. */
export function buildVocab(shipments: ManifestShipment[]): Vocab {
  const idOf = new Map<string, number>([[PAD_TOKEN, PAD_ID]]);
  let next = 2;
  for (const s of shipments) {
    for (const token of tokenize(s.description)) {
      if (token !== PAD_TOKEN && !idOf.has(token)) idOf.set(token, next++);
    }
  }
  return { idOf, size: Math.max(next, 2) };
}

export function tokenIds(description: string, vocab: Vocab): number[] {
  return tokenize(description).map((t) => vocab.idOf.get(t) ?? UNK_ID);
}

export interface FeatureEncoder {
  vocab: Vocab;
  groups: string[];
  customers: string[];
  nonSeqDim: number;
}

export function buildEncoder(shipments: ManifestShipment[]): FeatureEncoder {
  const vocab = buildVocab(shipments);
  const groups = [...new Set(shipments.map((s) => s.productGroup))].sort();
  const customers = [...new Set(shipments.map((s) => s.customerType))].sort();
  // one-hot product group + customer type, 12 month slots, log weight
  const nonSeqDim = groups.length + customers.length + 12 + 1;
  return { vocab, groups, customers, nonSeqDim };
}

export function encodeNonSeq(s: ManifestShipment, enc: FeatureEncoder): number[] {
  const row = new Array<number>(enc.nonSeqDim).fill(0);
  const g = enc.groups.indexOf(s.productGroup);
  if (g >= 0) row[g] = 1;
  const c = enc.customers.indexOf(s.customerType);
  if (c >= 0) row[enc.groups.length + c] = 1;
  const month = Number(s.arrivalDate.slice(5, 7));
  if (month >= 1 && month <= 12) row[enc.groups.length + enc.customers.length + month - 1] = 1;
  row[enc.nonSeqDim - 1] = Math.log1p(Math.max(0, s.palletWeight)) / 10;
  return row;
}

export interface Dataset {
  tokens: number[][]; // [n, 5]
  nonSeq: number[][]; // [n, nonSeqDim]
  targets: number[][]; // [n, 19]
  shipmentIds: string[];
}

export function encodeDataset(shipments: ManifestShipment[], enc: FeatureEncoder): Dataset {
  return {
    tokens: shipments.map((s) => tokenIds(s.description, enc.vocab)),
    nonSeq: shipments.map((s) => encodeNonSeq(s, enc)),
    targets: shipments.map((s) => s.target),
    shipmentIds: shipments.map((s) => s.shipmentId),
  };
}
