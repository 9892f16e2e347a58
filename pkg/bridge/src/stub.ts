/**
 * Deterministic stub policy: memorizes training records and replays them.
 *
 * Training stores, per conditioning-text fingerprint, the list of program
 * texts seen (most recent first, deduplicated). Sampling answers with the
 * memorized programs for the request's fingerprint, padded with a fixed
 * list of trivial one-liners, so responses are byte-identical for a given
 * memory state. This is enough for the engine's end-to-end loop to
 * measurably improve on memorized tasks; a neural backend can be dropped
 * in behind the same interface.
 */

import { createHash } from "node:crypto";

import { Request, Response } from "./protocol.js";
import { ContextLimits, DEFAULT_LIMITS, tokenizeAndTruncate } from "./truncate.js";

export const FALLBACK_PROGRAMS: readonly string[] = [
  "O = replace(I, TEN, TEN)",
  "O = vmirror(I)",
  "O = hmirror(I)",
  "O = rot180(I)",
  "O = compress(I)",
  "O = hconcat(I, I)",
];

export function fingerprint(encodedIo: string, limits: ContextLimits): string {
  const normalized = tokenizeAndTruncate(encodedIo, limits);
  return createHash("sha256").update(normalized, "utf-8").digest("hex");
}

export class StubPolicy {
  private memory = new Map<string, string[]>();
  public recordsSeen = 0;
  public requestsSeen = 0;

  constructor(private limits: ContextLimits = DEFAULT_LIMITS) {}

  memorySize(): number {
    return this.memory.size;
  }

  handle(request: Request): Response {
    if (request.kind === "train_request") {
      for (const record of request.records) {
        const key = fingerprint(record.io, this.limits);
        const known = this.memory.get(key) ?? [];
        const filtered = known.filter((p) => p !== record.program);
        filtered.unshift(record.program);
        this.memory.set(key, filtered);
      }
      this.recordsSeen += request.records.length;
      return { kind: "train_ack", received: request.records.length };
    }
    this.requestsSeen += 1;
    const key = fingerprint(request.encoded_io, this.limits);
    const memorized = this.memory.get(key) ?? [];
    const programs: string[] = [];
    for (const p of memorized) {
      if (programs.length >= request.n) break;
      programs.push(p);
    }
    for (const p of FALLBACK_PROGRAMS) {
      if (programs.length >= request.n) break;
      if (!programs.includes(p)) programs.push(p);
    }
    return { kind: "sample_response", programs };
  }
}
