import { describe, expect, it } from "vitest";
import { PassThrough } from "node:stream";

import { parseRequest, serialize } from "../src/protocol.js";
import { respondToLine, serveStream } from "../src/server.js";
import { StubPolicy } from "../src/stub.js";

describe("parseRequest", () => {
  it("accepts a sample request and ignores unknown fields", () => {
    const parsed = parseRequest(JSON.stringify({
      kind: "sample_request", task_id: "t", encoded_io: "io", n: 3,
      temperature: 0.95, extra_field: "ignored",
    }));
    expect(parsed.kind).toBe("sample_request");
  });

  it("rejects malformed JSON with an error message", () => {
    expect(parseRequest("{not json").kind).toBe("error");
  });

  it("rejects non-objects", () => {
    expect(parseRequest("[1,2]").kind).toBe("error");
    expect(parseRequest("42").kind).toBe("error");
  });

  it("rejects unknown kinds", () => {
    expect(parseRequest('{"kind":"poke"}').kind).toBe("error");
  });

  it("rejects bad field shapes", () => {
    expect(parseRequest('{"kind":"sample_request","n":0,"encoded_io":"x"}')
      .kind).toBe("error");
    expect(parseRequest('{"kind":"sample_request","encoded_io":7,"n":1}')
      .kind).toBe("error");
    expect(parseRequest('{"kind":"train_request","records":"no"}')
      .kind).toBe("error");
    expect(parseRequest('{"kind":"train_request","records":[{"io":1}]}')
      .kind).toBe("error");
  });
});

describe("respondToLine", () => {
  it("always produces exactly one response line", () => {
    const policy = new StubPolicy();
    const inputs = [
      JSON.stringify({ kind: "sample_request", encoded_io: "io", n: 1 }),
      "garbage",
      JSON.stringify({ kind: "train_request", records: [] }),
      '{"kind":"unknown"}',
    ];
    for (const line of inputs) {
      const reply = respondToLine(policy, line);
      expect(reply.split("\n")).toHaveLength(1);
      expect(() => JSON.parse(reply)).not.toThrow();
    }
  });
});

describe("serveStream fuzz", () => {
  function transcript(seed: number, length: number): string[] {
    // deterministic xorshift so failures reproduce
    let state = seed || 1;
    const next = () => {
      state ^= state << 13; state ^= state >> 17; state ^= state << 5;
      return Math.abs(state) % 1000 / 1000;
    };
    const lines: string[] = [];
    for (let k = 0; k < length; k++) {
      const roll = next();
      if (roll < 0.3) {
        lines.push(JSON.stringify({
          kind: "sample_request", task_id: `t${k}`,
          encoded_io: `io ${k}`, n: 1 + Math.floor(next() * 4),
          temperature: 0.95,
        }));
      } else if (roll < 0.5) {
        lines.push(JSON.stringify({
          kind: "train_request", epochs: 1, learning_rate: 5e-5,
          records: [{ io: `io ${k}`, program: "O = rot90(I)" }],
        }));
      } else if (roll < 0.65) {
        lines.push(`{"kind":"sample_request","n":${k}`); // cut-off JSON
      } else if (roll < 0.8) {
        lines.push(JSON.stringify({ kind: "mystery", n: k }));
      } else if (roll < 0.9) {
        lines.push("   ");
      } else {
        lines.push(JSON.stringify({
          kind: "sample_request", encoded_io: 12, n: "many",
        }));
      }
    }
    return lines;
  }

  it("never crashes and answers every non-blank line exactly once",
     async () => {
    for (const seed of [7, 99, 12345]) {
      const lines = transcript(seed, 300);
      const input = new PassThrough();
      const output = new PassThrough();
      const chunks: Buffer[] = [];
      output.on("data", (chunk: Buffer) => chunks.push(chunk));
      const done = serveStream(new StubPolicy(), input, output);
      input.end(lines.join("\n") + "\n");
      await done;
      await new Promise((resolve) => setImmediate(resolve));
      const replies = Buffer.concat(chunks).toString("utf-8")
        .split("\n").filter((l: string) => l !== "");
      const expected = lines.filter((l) => l.trim() !== "").length;
      expect(replies).toHaveLength(expected);
      let valid = 0;
      const kinds = new Map<string, number>();
      for (const reply of replies) {
        const parsed = JSON.parse(reply);
        kinds.set(parsed.kind, (kinds.get(parsed.kind) ?? 0) + 1);
        if (parsed.kind !== "error") valid += 1;
      }
      const validRequests = lines.filter((l) => {
        try {
          const k = JSON.parse(l).kind;
          return parseRequest(l).kind !== "error" &&
            (k === "sample_request" || k === "train_request");
        } catch {
          return false;
        }
      }).length;
      expect(valid).toBe(validRequests);
    }
  });
});
