/**
 * Entry point. Default transport is stdio; pass `--tcp PORT` to listen on
 * a socket instead. `--encoder-window N` / `--decoder-window N` size the
 * re-truncation limits.
 */

import { DEFAULT_LIMITS } from "./truncate.js";
import { StubPolicy } from "./stub.js";
import { serveStdio, serveTcp } from "./server.js";

function main(): void {
  const args = process.argv.slice(2);
  const limits = { ...DEFAULT_LIMITS };
  let tcpPort: number | null = null;
  for (let i = 0; i < args.length; i++) {
    switch (args[i]) {
      case "--tcp":
        tcpPort = Number(args[++i]);
        break;
      case "--encoder-window":
        limits.encoderWindow = Number(args[++i]);
        break;
      case "--decoder-window":
        limits.decoderWindow = Number(args[++i]);
        break;
      default:
        process.stderr.write(`unknown argument ${args[i]}\n`);
        process.exit(2);
    }
  }
  const policy = new StubPolicy(limits);
  if (tcpPort !== null) {
    serveTcp(policy, tcpPort);
    process.stderr.write(`policy bridge listening on 127.0.0.1:${tcpPort}\n`);
  } else {
    void serveStdio(policy).then(() => process.exit(0));
  }
}

main();
