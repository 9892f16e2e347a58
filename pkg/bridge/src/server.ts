/**
 * Serve loop: one JSON message per line in, exactly one response line out.
 * Malformed input produces an error message and the connection stays
 * open; the loop only ends at end-of-stream. Single-threaded, one request
 * in flight, matching the protocol contract.
 */

import { createInterface } from "node:readline";
import { createServer, Server, Socket } from "node:net";
import { Readable, Writable } from "node:stream";

import { errorMessage, parseRequest, serialize } from "./protocol.js";
import { StubPolicy } from "./stub.js";

/** Answer one raw line; always returns exactly one response line. */
export function respondToLine(policy: StubPolicy, line: string): string {
  const parsed = parseRequest(line);
  if (parsed.kind === "error") {
    return serialize(parsed);
  }
  try {
    return serialize(policy.handle(parsed));
  } catch (err) {
    return serialize(errorMessage(`internal: ${(err as Error).message}`));
  }
}

export function serveStream(
  policy: StubPolicy,
  input: Readable,
  output: Writable,
): Promise<void> {
  return new Promise((resolve) => {
    const lines = createInterface({ input, crlfDelay: Infinity });
    lines.on("line", (line) => {
      if (line.trim() === "") return;
      output.write(respondToLine(policy, line) + "\n");
    });
    lines.on("close", resolve);
  });
}

export function serveStdio(policy: StubPolicy): Promise<void> {
  return serveStream(policy, process.stdin, process.stdout);
}

export function serveTcp(policy: StubPolicy, port: number,
                         host = "127.0.0.1"): Server {
  const server = createServer((socket: Socket) => {
    void serveStream(policy, socket, socket);
  });
  server.listen(port, host);
  return server;
}
