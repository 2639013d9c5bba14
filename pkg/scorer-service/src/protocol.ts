/**
 * Stdio JSON-lines serve loop for the pair-scoring protocol, version 1.
 *
 * First exchange is the handshake {"op":"hello","version":1} answered by
 * {"ok":true,"version":1}.  After that each request line
 * {"id", "op":"score_pair", "hyp_a", "hyp_b"} gets exactly one response
 * {"id", "v"}, in order.  Malformed input produces {"id", "error"} (id null
 * when unparseable) and the loop continues; EOF ends the process cleanly.
 */

import * as readline from "node:readline";
import type { Readable, Writable } from "node:stream";
import { PairModel } from "./model.js";

export const PROTOCOL_VERSION = 1;

type Reply = Record<string, unknown>;

function handleLine(line: string, model: PairModel, handshaken: { done: boolean }): Reply {
  let msg: Record<string, unknown>;
  try {
    msg = JSON.parse(line) as Record<string, unknown>;
  } catch {
    return { id: null, error: "malformed request: not valid JSON" };
  }
  if (!handshaken.done) {
    if (msg.op !== "hello") {
      return { id: null, error: "expected hello handshake" };
    }
    if (msg.version !== PROTOCOL_VERSION) {
      return { id: null, error: `unsupported protocol version ${String(msg.version)}` };
    }
    handshaken.done = true;
    return { ok: true, version: PROTOCOL_VERSION };
  }
  const id = typeof msg.id === "number" ? msg.id : null;
  if (msg.op !== "score_pair") {
    return { id, error: `unknown op ${JSON.stringify(msg.op)}` };
  }
  const { hyp_a: hypA, hyp_b: hypB } = msg;
  if (!isTokenList(hypA) || !isTokenList(hypB)) {
    return { id, error: "hyp_a and hyp_b must be arrays of strings" };
  }
  if (id === null) {
    return { id, error: "missing numeric id" };
  }
  return { id, v: model.score(hypA, hypB) };
}

function isTokenList(x: unknown): x is string[] {
  return Array.isArray(x) && x.every((t) => typeof t === "string");
}

export function serve(model: PairModel, input: Readable, output: Writable): Promise<void> {
  const rl = readline.createInterface({ input, terminal: false });
  const handshaken = { done: false };
  return new Promise((resolve) => {
    rl.on("line", (line) => {
      if (!line.trim()) return;
      output.write(JSON.stringify(handleLine(line, model, handshaken)) + "\n");
    });
    rl.on("close", resolve);
  });
}
