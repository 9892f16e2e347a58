import { describe, expect, it } from "vitest";

import { FALLBACK_PROGRAMS, StubPolicy } from "../src/stub.js";
import { Request } from "../src/protocol.js";

function sample(io: string, n: number): Request {
  return {
    kind: "sample_request",
    task_id: "t",
    encoded_io: io,
    n,
    temperature: 0.95,
  };
}

function train(records: Array<[string, string]>): Request {
  return {
    kind: "train_request",
    epochs: 1,
    learning_rate: 5e-5,
    records: records.map(([io, program]) => ({ io, program })),
  };
}

describe("StubPolicy", () => {
  it("acks training with the received count", () => {
    const policy = new StubPolicy();
    const ack = policy.handle(train([
      ["io-a", "O = rot90(I)"],
      ["io-b", "O = vmirror(I)"],
    ]));
    expect(ack).toEqual({ kind: "train_ack", received: 2 });
  });

  it("falls back to trivial one-liners for unseen fingerprints", () => {
    const policy = new StubPolicy();
    const reply = policy.handle(sample("never seen", 3));
    expect(reply).toEqual({
      kind: "sample_response",
      programs: FALLBACK_PROGRAMS.slice(0, 3),
    });
  });

  it("replays memorized programs first", () => {
    const policy = new StubPolicy();
    policy.handle(train([["task io", "O = replace(I, THREE, SEVEN)"]]));
    const reply = policy.handle(sample("task io", 2));
    expect(reply).toEqual({
      kind: "sample_response",
      programs: ["O = replace(I, THREE, SEVEN)", FALLBACK_PROGRAMS[0]],
    });
  });

  it("most recent training wins and duplicates collapse", () => {
    const policy = new StubPolicy();
    policy.handle(train([["io", "O = rot90(I)"]]));
    policy.handle(train([["io", "O = rot180(I)"], ["io", "O = rot90(I)"]]));
    const reply = policy.handle(sample("io", 2));
    expect(reply).toEqual({
      kind: "sample_response",
      programs: ["O = rot90(I)", "O = rot180(I)"],
    });
  });

  it("fingerprints through its own truncation (idempotent matching)", () => {
    const policy = new StubPolicy({ encoderWindow: 8, decoderWindow: 8 });
    const longIo = Array.from({ length: 40 }, (_, k) => `g${k}`).join(" ") +
      "\nout section";
    policy.handle(train([[longIo, "O = compress(I)"]]));
    // the same text, already truncated by a previous pass, still matches
    const reply = policy.handle(sample(longIo, 1));
    expect(reply).toEqual({
      kind: "sample_response",
      programs: ["O = compress(I)"],
    });
  });

  it("gives byte-identical responses for a fixed memory state", () => {
    const policy = new StubPolicy();
    policy.handle(train([["io", "O = rot90(I)"]]));
    const a = JSON.stringify(policy.handle(sample("io", 4)));
    const b = JSON.stringify(policy.handle(sample("io", 4)));
    expect(a).toBe(b);
  });
});
