/**
 * The bridge's own text-length measure and half-window truncation.
 *
 * The engine truncates with a whitespace token count; a real sequence
 * model counts subword pieces, so the bridge re-truncates incoming text
 * with its own measure before fingerprinting or feeding a backend. The
 * measure here approximates subword growth: each whitespace token costs
 * ceil(length / 4) pieces, minimum one. Truncation cuts on whitespace
 * boundaries at half the encoder window per section and is idempotent.
 */

export interface ContextLimits {
  encoderWindow: number;
  decoderWindow: number;
}

export const DEFAULT_LIMITS: ContextLimits = {
  encoderWindow: 1024,
  decoderWindow: 512,
};

/** Approximate subword piece count of a text. */
export function subwordLength(text: string): number {
  let pieces = 0;
  for (const token of text.split(/\s+/)) {
    if (token.length === 0) continue;
    pieces += Math.max(1, Math.ceil(token.length / 4));
  }
  return pieces;
}

/** Longest whitespace-token prefix measuring at most `budget` pieces. */
export function truncateToBudget(text: string, budget: number): string {
  if (subwordLength(text) <= budget) {
    return text;
  }
  const tokens = text.split(" ");
  let lo = 0;
  let hi = tokens.length;
  while (lo < hi) {
    const mid = (lo + hi + 1) >> 1;
    if (subwordLength(tokens.slice(0, mid).join(" ")) <= budget) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  return tokens.slice(0, lo).join(" ");
}

/**
 * Re-truncate a two-section conditioning text (inputs then outputs,
 * newline-separated) at half the encoder window per section.
 * Applying it twice returns the same text.
 */
export function tokenizeAndTruncate(
  encodedIo: string,
  limits: ContextLimits = DEFAULT_LIMITS,
): string {
  const half = Math.floor(limits.encoderWindow / 2);
  const newline = encodedIo.indexOf("\n");
  if (newline === -1) {
    return truncateToBudget(encodedIo, half);
  }
  const inputs = truncateToBudget(encodedIo.slice(0, newline), half);
  const outputs = truncateToBudget(encodedIo.slice(newline + 1), half);
  return `${inputs}\n${outputs}`;
}
