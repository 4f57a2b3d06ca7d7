import path from 'node:path';
import { fileURLToPath } from 'node:url';

import { describe, expect, it } from 'vitest';

import { PAD_ID, PAD_TOKEN, UNK_ID, buildEncoder, buildVocab, encodeNonSeq, loadManifest, tokenIds, tokenize } from '../src/data.js';

const here = path.dirname(fileURLToPath(import.meta.url));
const FIXTURE = path.join(here, '..', 'fixtures', 'train.csv');

describe('tokenizer', () => {
  it('lowercases, keeps the first five tokens, pads with the null token', () => {
    expect(tokenize('NY TX TST CLUB PACK EXTRA')).toEqual(['ny', 'tx', 'tst', 'club', 'pack']);
    expect(tokenize('ckn wg')).toEqual(['ckn', 'wg', PAD_TOKEN, PAD_TOKEN, PAD_TOKEN]);
    expect(tokenize('')).toEqual([PAD_TOKEN, PAD_TOKEN, PAD_TOKEN, PAD_TOKEN, PAD_TOKEN]);
  });

  it('preserves word order', () => {
    expect(tokenize('ckn wg')).not.toEqual(tokenize('wg ckn'));
  });

  it('matches the upstream token column bit for bit on the shared fixture', () => {
    const shipments = loadManifest(FIXTURE);
    expect(shipments.length).toBe(50);
    for (const s of shipments) {
      expect(tokenize(s.description)).toEqual(s.tokens);
    }
  });
});

describe('vocab and encoding', () => {
  it('reserves pad and unknown ids', () => {
    const shipments = loadManifest(FIXTURE);
    const vocab = buildVocab(shipments);
    expect(vocab.idOf.get(PAD_TOKEN)).toBe(PAD_ID);
    const ids = tokenIds('never-seen-token spud', vocab);
    expect(ids[0]).toBe(UNK_ID);
    expect(ids[1]).toBeGreaterThan(UNK_ID);
    expect(ids[2]).toBe(PAD_ID);
  });

  it('one-hot encodes groups, customers and month plus a weight slot', () => {
    const shipments = loadManifest(FIXTURE);
    const enc = buildEncoder(shipments);
    expect(enc.nonSeqDim).toBe(enc.groups.length + enc.customers.length + 12 + 1);
    const row = encodeNonSeq(shipments[0], enc);
    expect(row.length).toBe(enc.nonSeqDim);
    const groupHot = row.slice(0, enc.groups.length).reduce((a, b) => a + b, 0);
    expect(groupHot).toBe(1);
    expect(row[enc.nonSeqDim - 1]).toBeGreaterThan(0);
  });

  it('rejects manifests missing target columns', () => {
    expect(() => loadManifest(path.join(here, 'no-such-file.csv'))).toThrow();
  });
});
