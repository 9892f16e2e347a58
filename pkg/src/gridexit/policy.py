"""Program-sampling policies, task encoding, and the external-policy protocol.

Tasks are shown to policies as text: demonstration pairs are ordered by
grid size, sparse-encoded, and split into an input section and an output
section that each get half of the encoder budget. Truncation uses a
pluggable text-length measure defaulting to whitespace token count; real
subword tokenizers live on the policy side of the wire, which may
re-truncate with its own measure.

The wire protocol is newline-delimited JSON over stdio or TCP, one message
per line, one request in flight per connection:

  {"kind": "sample_request", "task_id": ..., "encoded_io": ..., "n": N,
   "temperature": t}            -> {"kind": "sample_response", "programs": [...]}
  {"kind": "train_request", "epochs": N, "learning_rate": lr,
   "records": [{"io": ..., "program": ...}, ...]}
                                -> {"kind": "train_ack", "received": N}
  anything malformed            -> {"kind": "error", "message": ...}

Unknown fields are ignored on both sides.
"""

from __future__ import annotations

import json
import random
import socket
import subprocess
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from .dsl import ProgramError, Registry, parse_program, print_program
from .grid import Grid, encode_sparse
from .sampling import random_program
from .semantics import default_registry

END_OF_SEQUENCE = "<eos>"
MAX_PAIRS_SHOWN = 10


def whitespace_token_count(text: str) -> int:
    """Default text-length measure: whitespace-delimited tokens."""
    return len(text.split())


@dataclass(frozen=True)
class EncodingBudget:
    encoder_limit: int = 1024
    decoder_limit: int = 512
    length_fn: Callable[[str], int] = whitespace_token_count


@dataclass(frozen=True)
class PolicyRequest:
    task_id: str
    encoded_io: str
    n_samples: int = 24
    temperature: float = 0.95

    def __post_init__(self):
        if self.n_samples < 1:
            raise ValueError("n_samples must be >= 1")
        if self.temperature <= 0:
            raise ValueError("temperature must be positive")


@dataclass(frozen=True)
class PolicyTrainingBatch:
    records: tuple  # of TrainingRecord-like (io_text, program_text)
    epochs: int = 1
    learning_rate: float = 5e-5

    def __post_init__(self):
        if not self.records:
            raise ValueError("training batch must be nonempty")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")


def truncate_text(text: str, limit: int, length_fn: Callable[[str], int]) -> str:
    """Longest whitespace-token prefix whose measured length fits `limit`."""
    if length_fn(text) <= limit:
        return text
    tokens = text.split(" ")
    lo, hi = 0, len(tokens)  # invariant: prefix of lo tokens fits
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if length_fn(" ".join(tokens[:mid])) <= limit:
            lo = mid
        else:
            hi = mid - 1
    return " ".join(tokens[:lo])


@dataclass
class EncodeStats:
    pairs_shown: int = 0
    input_truncated: bool = False
    output_truncated: bool = False


def encode_task(demos: Sequence[tuple[Grid, Grid]],
                budget: EncodingBudget,
                *, one_demo: bool = False,
                stats: Optional[EncodeStats] = None) -> str:
    """Render demonstration pairs as the two-section policy conditioning text.

    Pairs are ordered by total cell count (stable), capped at ten (one in
    the reduced-context ablation), sparse-encoded inputs first and outputs
    second, each section truncated to half the encoder budget; the output
    section ends with the end-of-sequence marker.
    """
    if not demos:
        raise ValueError("need at least one demonstration pair")
    half = budget.encoder_limit // 2

    def pair_cells(pair):
        i, o = pair
        return len(i) * len(i[0]) + len(o) * len(o[0])

    ordered = sorted(demos, key=pair_cells)
    ordered = ordered[:1] if one_demo else ordered[:MAX_PAIRS_SHOWN]

    input_text = " ".join(encode_sparse(i) for i, _ in ordered)
    output_text = " ".join(encode_sparse(o) for _, o in ordered)
    input_cut = truncate_text(input_text, half, budget.length_fn)
    output_cut = truncate_text(output_text, half, budget.length_fn)
    if stats is not None:
        stats.pairs_shown = len(ordered)
        stats.input_truncated = input_cut != input_text
        stats.output_truncated = output_cut != output_text
    return f"{input_cut}\n{output_cut} {END_OF_SEQUENCE}"


def classify_samples(texts: Sequence[str], registry: Optional[Registry] = None):
    """Parse/typecheck each candidate text: list of (text, program_or_None, status)."""
    registry = registry or default_registry()
    out = []
    for text in texts:
        try:
            program = parse_program(text, registry)
            out.append((text, program, "ok"))
        except ProgramError as exc:
            out.append((text, None, type(exc).__name__))
    return out


def sample_programs(policy: "Policy", request: PolicyRequest,
                    registry: Optional[Registry] = None):
    """Draw up to n_samples candidates and classify each: a list of
    (text, program_or_None, parse/typecheck status) triples."""
    texts = policy.sample(request)[:request.n_samples]
    return classify_samples(texts, registry)


class PolicyUnavailable(RuntimeError):
    """Transport failure talking to an external policy."""


class Policy:
    """Interface: sample candidate program texts, optionally learn."""

    name = "policy"
    trainable = False

    def sample(self, request: PolicyRequest) -> list[str]:
        raise NotImplementedError

    def train(self, batch: PolicyTrainingBatch):
        """Returns {"status": "ack", "received": n} or {"status": "unsupported"}."""
        return {"status": "unsupported"}

    def close(self) -> None:
        pass


class RandomPolicy(Policy):
    """Line-by-line random program sampler; deterministic given its seed.

    Draws a primitive uniformly per line, samples type-correct arguments,
    and ends the program with probability 0.8 whenever a line produced a
    grid. Ignores the conditioning text and the temperature.
    """

    name = "random"

    def __init__(self, seed: int = 0, registry: Optional[Registry] = None,
                 stop_probability: float = 0.8):
        self.seed = seed
        self.registry = registry or default_registry()
        self.stop_probability = stop_probability
        self._epoch = 0
        self._request_counter: dict[str, int] = {}

    def reseed(self, epoch: int) -> None:
        """Rebase the per-task streams, making resumed runs reproducible."""
        self._epoch = epoch
        self._request_counter.clear()

    def sample(self, request: PolicyRequest) -> list[str]:
        count = self._request_counter.get(request.task_id, 0)
        self._request_counter[request.task_id] = count + 1
        rng = random.Random(
            f"{self.seed}|{self._epoch}|{request.task_id}|{count}")
        return [print_program(random_program(
            self.registry, rng, stop_probability=self.stop_probability))
            for _ in range(request.n_samples)]

    def sample_one(self, rng: random.Random) -> str:
        """Single unconditioned draw, for the random search baseline."""
        return print_program(random_program(
            self.registry, rng, stop_probability=self.stop_probability))


def random_policy_sample(rng: random.Random,
                         registry: Optional[Registry] = None) -> str:
    """One random-baseline program text."""
    registry = registry or default_registry()
    return print_program(random_program(registry, rng))


# ---------------------------------------------------------------------------
# External policies over the wire protocol

class _StdioTransport:
    def __init__(self, command: Sequence[str]):
        try:
            self._proc = subprocess.Popen(
                list(command), stdin=subprocess.PIPE, stdout=subprocess.PIPE,
                text=True, bufsize=1, encoding="utf-8")
        except OSError as exc:
            raise PolicyUnavailable(f"cannot launch policy process: {exc}") from exc

    def roundtrip(self, line: str) -> str:
        proc = self._proc
        if proc.poll() is not None:
            raise PolicyUnavailable("policy process exited")
        try:
            proc.stdin.write(line + "\n")
            proc.stdin.flush()
            reply = proc.stdout.readline()
        except (BrokenPipeError, OSError) as exc:
            raise PolicyUnavailable(f"policy pipe broken: {exc}") from exc
        if reply == "":
            raise PolicyUnavailable("policy process closed its output")
        return reply.rstrip("\n")

    def close(self) -> None:
        proc = self._proc
        if proc.poll() is None:
            try:
                proc.stdin.close()
            except OSError:
                pass
            try:
                proc.wait(timeout=5)
            except subprocess.TimeoutExpired:
                proc.kill()


class _TcpTransport:
    def __init__(self, host: str, port: int, timeout: float = 30.0):
        try:
            self._sock = socket.create_connection((host, port), timeout=timeout)
        except OSError as exc:
            raise PolicyUnavailable(f"cannot connect to policy: {exc}") from exc
        self._reader = self._sock.makefile("r", encoding="utf-8", newline="\n")
        self._writer = self._sock.makefile("w", encoding="utf-8", newline="\n")

    def roundtrip(self, line: str) -> str:
        try:
            self._writer.write(line + "\n")
            self._writer.flush()
            reply = self._reader.readline()
        except OSError as exc:
            raise PolicyUnavailable(f"policy socket error: {exc}") from exc
        if reply == "":
            raise PolicyUnavailable("policy closed the connection")
        return reply.rstrip("\n")

    def close(self) -> None:
        for closer in (self._reader, self._writer, self._sock):
            try:
                closer.close()
            except OSError:
                pass


class ExternalPolicy(Policy):
    """Client for a policy process speaking the line protocol."""

    name = "external"
    trainable = True

    def __init__(self, transport):
        self._transport = transport

    @classmethod
    def over_stdio(cls, command: Sequence[str]) -> "ExternalPolicy":
        return cls(_StdioTransport(command))

    @classmethod
    def over_tcp(cls, host: str, port: int) -> "ExternalPolicy":
        return cls(_TcpTransport(host, port))

    def _request(self, message: dict) -> dict:
        line = json.dumps(message, sort_keys=True, separators=(",", ":"))
        reply = self._transport.roundtrip(line)
        try:
            parsed = json.loads(reply)
        except json.JSONDecodeError as exc:
            raise PolicyUnavailable(f"malformed policy reply: {exc}") from exc
        if not isinstance(parsed, dict):
            raise PolicyUnavailable("policy reply is not an object")
        if parsed.get("kind") == "error":
            raise PolicyUnavailable(f"policy error: {parsed.get('message')}")
        return parsed

    def sample(self, request: PolicyRequest) -> list[str]:
        reply = self._request({
            "kind": "sample_request",
            "task_id": request.task_id,
            "encoded_io": request.encoded_io,
            "n": request.n_samples,
            "temperature": request.temperature,
        })
        if reply.get("kind") != "sample_response":
            raise PolicyUnavailable(f"unexpected reply kind {reply.get('kind')!r}")
        programs = reply.get("programs")
        if not isinstance(programs, list):
            raise PolicyUnavailable("sample_response without a programs list")
        return [str(p) for p in programs[:request.n_samples]]

    def train(self, batch: PolicyTrainingBatch):
        reply = self._request({
            "kind": "train_request",
            "epochs": batch.epochs,
            "learning_rate": batch.learning_rate,
            "records": [{"io": r.io_text, "program": r.program_text}
                        for r in batch.records],
        })
        if reply.get("kind") != "train_ack":
            raise PolicyUnavailable(f"unexpected reply kind {reply.get('kind')!r}")
        return {"status": "ack", "received": int(reply.get("received", 0))}

    def close(self) -> None:
        self._transport.close()


def dispatch_training(policy: Policy, batch: PolicyTrainingBatch):
    """Send a training batch; baseline policies report unsupported."""
    return policy.train(batch)


def open_policy(endpoint: str, seed: int = 0,
                registry: Optional[Registry] = None) -> Policy:
    """Resolve an endpoint spec: builtin:random, stdio:<cmd>, tcp:<host:port>."""
    if endpoint in ("builtin:random", "random"):
        return RandomPolicy(seed=seed, registry=registry)
    if endpoint.startswith("stdio:"):
        import shlex
        return ExternalPolicy.over_stdio(shlex.split(endpoint[len("stdio:"):]))
    if endpoint.startswith("tcp:"):
        host, _, port = endpoint[len("tcp:"):].rpartition(":")
        return ExternalPolicy.over_tcp(host or "127.0.0.1", int(port))
    raise ValueError(f"unknown policy endpoint {endpoint!r}")
