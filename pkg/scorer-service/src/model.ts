/**
 * Hashed bag-of-words pair classifier with a logistic head.
 *
 * A hypothesis is embedded as signed hashed unigram counts; a pair (a, b)
 * is represented by the difference phi(a) - phi(b).  The head has no bias
 * term, so the model is antisymmetric by construction: score(a, b) and
 * score(b, a) sum to 1, and identical hypotheses score exactly 0.5.
 */

export interface ModelConfig {
  dim: number;
  epochs: number;
  learningRate: number;
  seed: number;
  holdoutFraction: number;
}

export const DEFAULT_CONFIG: ModelConfig = {
  dim: 1024,
  epochs: 20,
  learningRate: 0.5,
  seed: 0,
  holdoutFraction: 0.2,
};

export interface PairExample {
  hypA: string[];
  hypB: string[];
  label: 0 | 1;
}

export interface TrainReport {
  trainExamples: number;
  holdoutExamples: number;
  holdoutAccuracy: number;
  skippedEqual: number;
  finalLoss: number;
}

/** FNV-1a hash of a token; bit 31 selects the sign, the rest the bucket. */
function hashToken(token: string): { bucket: number; sign: number } {
  let h = 0x811c9dc5;
  for (let i = 0; i < token.length; i++) {
    h ^= token.charCodeAt(i);
    h = Math.imul(h, 0x01000193);
  }
  h >>>= 0;
  return { bucket: h & 0x7fffffff, sign: h & 0x80000000 ? -1 : 1 };
}

export function embed(tokens: string[], dim: number): Float64Array {
  const v = new Float64Array(dim);
  for (const token of tokens) {
    const { bucket, sign } = hashToken(token);
    v[bucket % dim] += sign;
  }
  return v;
}

export function pairFeatures(hypA: string[], hypB: string[], dim: number): Float64Array {
  const a = embed(hypA, dim);
  const b = embed(hypB, dim);
  for (let i = 0; i < dim; i++) a[i] -= b[i];
  return a;
}

function sigmoid(z: number): number {
  return z >= 0 ? 1 / (1 + Math.exp(-z)) : Math.exp(z) / (1 + Math.exp(z));
}

/** Deterministic PRNG (mulberry32) so training is reproducible per seed. */
export function makeRng(seed: number): () => number {
  let state = seed >>> 0;
  return () => {
    state = (state + 0x6d2b79f5) >>> 0;
    let t = state;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export class PairModel {
  constructor(
    readonly dim: number,
    readonly weights: Float64Array,
  ) {}

  /** Probability that hypA is the better hypothesis; in (0, 1). */
  score(hypA: string[], hypB: string[]): number {
    const x = pairFeatures(hypA, hypB, this.dim);
    let z = 0;
    for (let i = 0; i < this.dim; i++) z += this.weights[i] * x[i];
    const v = sigmoid(z);
    return Math.min(Math.max(v, 1e-9), 1 - 1e-9);
  }

  toJSON(): object {
    return { format: "pair-scorer-model", version: 1, dim: this.dim, weights: Array.from(this.weights) };
  }

  static fromJSON(raw: unknown): PairModel {
    const obj = raw as { format?: string; version?: number; dim?: number; weights?: number[] };
    if (obj?.format !== "pair-scorer-model" || obj.version !== 1) {
      throw new Error("not a pair-scorer model");
    }
    if (typeof obj.dim !== "number" || !Array.isArray(obj.weights) || obj.weights.length !== obj.dim) {
      throw new Error("corrupt model: dim/weights mismatch");
    }
    return new PairModel(obj.dim, Float64Array.from(obj.weights));
  }
}

export function trainModel(
  examples: PairExample[],
  config: ModelConfig = DEFAULT_CONFIG,
  skippedEqual = 0,
): { model: PairModel; report: TrainReport } {
  if (examples.length === 0) {
    throw new Error("empty training set");
  }
  const rng = makeRng(config.seed);
  const order = examples.map((_, i) => i);
  for (let i = order.length - 1; i > 0; i--) {
    const j = Math.floor(rng() * (i + 1));
    [order[i], order[j]] = [order[j], order[i]];
  }
  const nHoldout = Math.min(
    examples.length - 1,
    Math.floor(examples.length * config.holdoutFraction),
  );
  const holdout = order.slice(0, nHoldout).map((i) => examples[i]);
  const trainSet = order.slice(nHoldout).map((i) => examples[i]);

  const w = new Float64Array(config.dim);
  const features = trainSet.map((ex) => pairFeatures(ex.hypA, ex.hypB, config.dim));
  let finalLoss = 0;
  for (let epoch = 0; epoch < config.epochs; epoch++) {
    const epochOrder = trainSet.map((_, i) => i);
    for (let i = epochOrder.length - 1; i > 0; i--) {
      const j = Math.floor(rng() * (i + 1));
      [epochOrder[i], epochOrder[j]] = [epochOrder[j], epochOrder[i]];
    }
    finalLoss = 0;
    for (const idx of epochOrder) {
      const x = features[idx];
      const y = trainSet[idx].label;
      let z = 0;
      for (let k = 0; k < config.dim; k++) z += w[k] * x[k];
      const v = sigmoid(z);
      const g = v - y;
      for (let k = 0; k < config.dim; k++) w[k] -= config.learningRate * g * x[k];
      const vc = Math.min(Math.max(v, 1e-12), 1 - 1e-12);
      finalLoss += -(y * Math.log(vc) + (1 - y) * Math.log(1 - vc));
    }
    finalLoss /= trainSet.length;
  }

  const model = new PairModel(config.dim, w);
  let correct = 0;
  for (const ex of holdout) {
    if ((model.score(ex.hypA, ex.hypB) > 0.5 ? 1 : 0) === ex.label) correct++;
  }
  return {
    model,
    report: {
      trainExamples: trainSet.length,
      holdoutExamples: holdout.length,
      holdoutAccuracy: holdout.length ? correct / holdout.length : NaN,
      skippedEqual,
      finalLoss,
    },
  };
}

/**
 * Parse the tab-separated fine-tuning file
 * `utt_id <TAB> i <TAB> j <TAB> label <TAB> tokens_a <TAB> tokens_b`,
 * where label is 1, 0, or EQ.  EQ rows are skipped (and counted) even
 * though the producer normally filters them already.
 */
export function parsePairsFile(text: string): { examples: PairExample[]; skippedEqual: number } {
  const examples: PairExample[] = [];
  let skippedEqual = 0;
  const lines = text.split("\n");
  for (let n = 0; n < lines.length; n++) {
    const line = lines[n];
    if (!line.trim()) continue;
    const parts = line.split("\t");
    if (parts.length !== 6) {
      throw new Error(`line ${n + 1}: expected 6 tab-separated fields, got ${parts.length}`);
    }
    const label = parts[3];
    if (label === "EQ") {
      skippedEqual++;
      continue;
    }
    if (label !== "0" && label !== "1") {
      throw new Error(`line ${n + 1}: bad label ${JSON.stringify(label)}`);
    }
    examples.push({
      hypA: parts[4].split(" ").filter((t) => t.length > 0),
      hypB: parts[5].split(" ").filter((t) => t.length > 0),
      label: label === "1" ? 1 : 0,
    });
  }
  return { examples, skippedEqual };
}
