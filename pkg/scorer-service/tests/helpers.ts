import { makeRng, PairExample } from "../dist/model.js";

const VOCAB = ["alpha", "bravo", "charlie", "delta", "echo", "foxtrot", "golf", "hotel"];
export const MARKER = "xmark";

/** Labeled pairs where the marker token always sits on the better side. */
export function riggedExamples(n: number, seed = 1): PairExample[] {
  const rng = makeRng(seed);
  const sentence = () =>
    Array.from({ length: 3 + Math.floor(rng() * 4) }, () => VOCAB[Math.floor(rng() * VOCAB.length)]);
  const examples: PairExample[] = [];
  for (let i = 0; i < n; i++) {
    const good = [...sentence(), MARKER];
    const bad = sentence();
    const label = rng() < 0.5 ? 1 : 0;
    examples.push(label === 1 ? { hypA: good, hypB: bad, label } : { hypA: bad, hypB: good, label });
  }
  return examples;
}

export function examplesToPairsFile(examples: PairExample[]): string {
  return (
    examples
      .map(
        (ex, k) => `u${k}\t0\t1\t${ex.label}\t${ex.hypA.join(" ")}\t${ex.hypB.join(" ")}`,
      )
      .join("\n") + "\n"
  );
}
