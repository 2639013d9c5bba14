/**
 * Command-line entry point.
 *
 *   node dist/cli.js fine-tune --pairs pairs.tsv --out model.json
 *                    [--dim N] [--epochs N] [--lr X] [--seed N] [--holdout X]
 *   node dist/cli.js serve --model model.json
 */

import * as fs from "node:fs";
import * as process from "node:process";
import { DEFAULT_CONFIG, PairModel, parsePairsFile, trainModel } from "./model.js";
import { serve } from "./protocol.js";

function parseFlags(argv: string[]): Map<string, string> {
  const flags = new Map<string, string>();
  for (let i = 0; i < argv.length; i += 2) {
    const key = argv[i];
    if (!key.startsWith("--") || i + 1 >= argv.length) {
      throw new Error(`bad arguments near ${JSON.stringify(key)}`);
    }
    flags.set(key.slice(2), argv[i + 1]);
  }
  return flags;
}

function requireFlag(flags: Map<string, string>, name: string): string {
  const value = flags.get(name);
  if (value === undefined) throw new Error(`missing required flag --${name}`);
  return value;
}

function numberFlag(flags: Map<string, string>, name: string, fallback: number): number {
  const value = flags.get(name);
  if (value === undefined) return fallback;
  const parsed = Number(value);
  if (!Number.isFinite(parsed)) throw new Error(`--${name} must be a number`);
  return parsed;
}

async function main(): Promise<number> {
  const [command, ...rest] = process.argv.slice(2);
  if (command === "fine-tune") {
    const flags = parseFlags(rest);
    const pairsPath = requireFlag(flags, "pairs");
    const outPath = requireFlag(flags, "out");
    const config = {
      dim: numberFlag(flags, "dim", DEFAULT_CONFIG.dim),
      epochs: numberFlag(flags, "epochs", DEFAULT_CONFIG.epochs),
      learningRate: numberFlag(flags, "lr", DEFAULT_CONFIG.learningRate),
      seed: numberFlag(flags, "seed", DEFAULT_CONFIG.seed),
      holdoutFraction: numberFlag(flags, "holdout", DEFAULT_CONFIG.holdoutFraction),
    };
    const { examples, skippedEqual } = parsePairsFile(fs.readFileSync(pairsPath, "utf8"));
    const { model, report } = trainModel(examples, config, skippedEqual);
    fs.writeFileSync(outPath, JSON.stringify(model.toJSON()) + "\n");
    console.error(
      `trained on ${report.trainExamples} pairs ` +
        `(${report.skippedEqual} equal-label rows skipped), ` +
        `held-out accuracy ${report.holdoutAccuracy.toFixed(4)} ` +
        `on ${report.holdoutExamples} pairs, final loss ${report.finalLoss.toFixed(4)}`,
    );
    return 0;
  }
  if (command === "serve") {
    const flags = parseFlags(rest);
    const modelPath = requireFlag(flags, "model");
    const model = PairModel.fromJSON(JSON.parse(fs.readFileSync(modelPath, "utf8")));
    await serve(model, process.stdin, process.stdout);
    return 0;
  }
  console.error("usage: cli.js fine-tune --pairs FILE --out FILE | serve --model FILE");
  return 1;
}

main().then(
  (code) => process.exit(code),
  (err) => {
    console.error(String(err instanceof Error ? err.message : err));
    process.exit(1);
  },
);
