"""Greedy autoregressive decoding over pluggable token backends.

The engine never tokenizes: a backend serves candidate token strings with
scores for a given input text and already-chosen token prefix, and the
output text is the concatenation of chosen tokens. The constraint
mechanism substitutes the first generated token(s) with a forced prefix
(default ``<``, the opening mark of every well-formed target), which
guarantees the output starts in-format regardless of what the backend
would have preferred.

Backends may live in-process (the table and noise fixtures below) or
behind the stdio wire protocol: newline-delimited JSON over a child
process's standard input/output::

    -> {"op": "hello"}
    <- {"ok": true, "name": ..., "end_token": ...}
    -> {"op": "next", "input": ..., "prefix": [...], "top_k": K}
    <- {"ok": true, "candidates": [{"t": ..., "s": ...}, ...]}
    -> {"op": "bye"}

One message per line, UTF-8. A backend that emits a malformed line is
killed and reported.
"""

from __future__ import annotations

import json
import math
import random
import shlex
import subprocess
from dataclasses import dataclass, field
from typing import Iterable, Protocol, Sequence

from .formats import IoPair

DEFAULT_MAX_LEN = 400
DEFAULT_END_TOKEN = "</s>"


class BackendError(Exception):
    """A backend failed to serve a request."""


class BackendContractError(BackendError):
    """A backend reply violated the backend contract."""


class BackendProtocolError(BackendError):
    """A wire-protocol backend sent something that is not protocol."""


class DecodeError(Exception):
    """Decoding aborted mid-sequence; carries the steps taken so far."""

    def __init__(self, message: str, steps: tuple[DecodeStep, ...]):
        super().__init__(message)
        self.steps = steps


@dataclass(frozen=True)
class TokenCandidate:
    """One candidate continuation: token surface string and its score."""

    token_text: str
    score: float

    def __post_init__(self) -> None:
        if not self.token_text:
            raise ValueError("candidate token_text must be non-empty")
        if not math.isfinite(self.score):
            raise ValueError("candidate score must be finite")


@dataclass(frozen=True)
class BackendInfo:
    name: str
    end_token: str
    max_len: int | None = None


@dataclass(frozen=True)
class ConstraintSpec:
    """Forced token prefix; default forces the opening mark only."""

    forced_prefix: tuple[str, ...] = ("<",)
    enabled: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "forced_prefix", tuple(self.forced_prefix))
        if any(not t for t in self.forced_prefix):
            raise ValueError("forced prefix tokens must be non-empty")


@dataclass(frozen=True)
class DecodeStep:
    """One step's bookkeeping: what was offered, what was taken."""

    index: int
    candidates: tuple[TokenCandidate, ...]
    chosen: str
    forced: bool


@dataclass(frozen=True)
class DecodeResult:
    output_text: str
    steps: tuple[DecodeStep, ...]
    stop_reason: str  # "end-token" | "max-length"


class Backend(Protocol):
    """What the engine needs from any token source."""

    def describe(self) -> BackendInfo: ...

    def next(self, input_text: str, chosen_prefix: Sequence[str]) -> list[TokenCandidate]: ...


def _argmax(candidates: Sequence[TokenCandidate]) -> TokenCandidate:
    best = candidates[0]
    for cand in candidates[1:]:
        if cand.score > best.score:  # ties keep the earliest position
            best = cand
    return best


def decode(
    backend: Backend,
    input_text: str,
    constraint: ConstraintSpec = ConstraintSpec(),
    max_len: int = DEFAULT_MAX_LEN,
) -> DecodeResult:
    """Greedy rollout with the forced-prefix substitution applied.

    At step i the chosen token is ``constraint.forced_prefix[i]`` while the
    constraint covers i, otherwise the argmax candidate (earliest position
    wins ties). Forced tokens are fed back into the prefix so every later
    distribution conditions on what was actually emitted. Decoding stops at
    the backend's end token or after ``max_len`` steps.
    """
    if max_len <= 0:
        raise ValueError("max_len must be positive")
    info = backend.describe()
    steps: list[DecodeStep] = []
    chosen_tokens: list[str] = []
    stop_reason = "max-length"
    for index in range(max_len):
        try:
            candidates = backend.next(input_text, tuple(chosen_tokens))
        except BackendError as exc:
            raise DecodeError(f"backend failed at step {index}: {exc}", tuple(steps)) from exc
        if not candidates:
            raise BackendContractError(f"backend returned no candidates at step {index}")
        forced = constraint.enabled and index < len(constraint.forced_prefix)
        if forced:
            token = constraint.forced_prefix[index]
        else:
            token = _argmax(candidates).token_text
        steps.append(DecodeStep(index, tuple(candidates), token, forced))
        if token == info.end_token:
            stop_reason = "end-token"
            break
        chosen_tokens.append(token)
    return DecodeResult("".join(chosen_tokens), tuple(steps), stop_reason)


@dataclass(frozen=True)
class DecodedPair:
    """One batch item ready for evaluation; ``error`` notes a failed item."""

    generated: str
    gold: str
    error: str | None = None


def batch_decode(
    backend: Backend,
    io_pairs: Iterable[IoPair],
    constraint: ConstraintSpec = ConstraintSpec(),
    max_len: int = DEFAULT_MAX_LEN,
) -> list[DecodedPair]:
    """Decode a batch in order, isolating per-item failures.

    A failing item becomes an empty (hence format-invalid) output with the
    error recorded; a failing handshake aborts the whole batch.
    """
    backend.describe()  # handshake failure is batch-level
    results = []
    for pair in io_pairs:
        try:
            result = decode(backend, pair.input_text, constraint, max_len)
            results.append(DecodedPair(result.output_text, pair.target_text))
        except (DecodeError, BackendError) as exc:
            results.append(DecodedPair("", pair.target_text, error=str(exc)))
    return results


# -- built-in backends ---------------------------------------------------------


class TableBackend:
    """Exact input-to-token-sequence replay, for golden tests.

    Candidates depend only on the step position, so a forced token never
    derails the rest of the scripted sequence.
    """

    def __init__(
        self,
        mapping: dict[str, Sequence[str]],
        name: str = "table",
        end_token: str = DEFAULT_END_TOKEN,
    ):
        self._mapping = {k: tuple(v) for k, v in mapping.items()}
        self._name = name
        self._end_token = end_token

    @classmethod
    def from_targets(
        cls,
        pairs: Iterable[IoPair] | dict[str, str],
        name: str = "table",
        end_token: str = DEFAULT_END_TOKEN,
    ) -> TableBackend:
        """Build a replay table from target strings, one character per token."""
        if isinstance(pairs, dict):
            items = pairs.items()
        else:
            items = ((p.input_text, p.target_text) for p in pairs)
        return cls({inp: tuple(target) for inp, target in items}, name, end_token)

    def describe(self) -> BackendInfo:
        return BackendInfo(self._name, self._end_token)

    def next(self, input_text: str, chosen_prefix: Sequence[str]) -> list[TokenCandidate]:
        if input_text not in self._mapping:
            raise BackendError(f"table backend has no entry for input {input_text!r}")
        sequence = self._mapping[input_text]
        position = len(chosen_prefix)
        if position >= len(sequence):
            return [TokenCandidate(self._end_token, 0.0)]
        return [TokenCandidate(sequence[position], 0.0)]


class FirstTokenNoiseBackend:
    """Wraps a backend and corrupts the step-0 argmax with probability p.

    The corruption inserts ``noise_token`` above every real candidate, so an
    unconstrained greedy decode starts with garbage while a constrained one
    is unaffected. Draws come from a seeded generator, one per step-0 call,
    so batch runs are reproducible.
    """

    def __init__(self, inner: Backend, p: float, seed: int, noise_token: str = "X"):
        if not (0.0 <= p <= 1.0):
            raise ValueError("p must be in [0, 1]")
        self._inner = inner
        self._p = p
        self._rng = random.Random(seed)
        self._noise_token = noise_token

    def describe(self) -> BackendInfo:
        info = self._inner.describe()
        return BackendInfo(f"first-token-noise({info.name})", info.end_token, info.max_len)

    def next(self, input_text: str, chosen_prefix: Sequence[str]) -> list[TokenCandidate]:
        candidates = self._inner.next(input_text, chosen_prefix)
        if len(chosen_prefix) == 0 and candidates:
            fire = self._p >= 1.0 or self._rng.random() < self._p
            if fire:
                top = max(c.score for c in candidates)
                return [TokenCandidate(self._noise_token, top + 1.0), *candidates]
        return candidates


class RecordingBackend:
    """Wrapper that logs every (input, prefix) the engine sends."""

    def __init__(self, inner: Backend):
        self._inner = inner
        self.calls: list[tuple[str, tuple[str, ...]]] = []

    def describe(self) -> BackendInfo:
        return self._inner.describe()

    def next(self, input_text: str, chosen_prefix: Sequence[str]) -> list[TokenCandidate]:
        self.calls.append((input_text, tuple(chosen_prefix)))
        return self._inner.next(input_text, chosen_prefix)


# -- stdio wire protocol -------------------------------------------------------


class StdioBackend:
    """Client side of the newline-delimited JSON backend protocol.

    Spawns the backend as a child process, performs the hello handshake on
    first use, and translates `next` requests. Any line from the child that
    is not a protocol message kills the child and raises
    :class:`BackendProtocolError`.
    """

    def __init__(self, command: Sequence[str] | str, top_k: int = 5):
        self._command = shlex.split(command) if isinstance(command, str) else list(command)
        if not self._command:
            raise ValueError("backend command must be non-empty")
        self._top_k = top_k
        self._proc: subprocess.Popen | None = None
        self._info: BackendInfo | None = None

    # lifecycle ---------------------------------------------------------

    def __enter__(self) -> StdioBackend:
        self.describe()
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def _ensure_started(self) -> None:
        if self._proc is None:
            try:
                self._proc = subprocess.Popen(
                    self._command,
                    stdin=subprocess.PIPE,
                    stdout=subprocess.PIPE,
                    text=True,
                    encoding="utf-8",
                )
            except OSError as exc:
                raise BackendError(f"cannot start backend {self._command!r}: {exc}") from exc

    def _kill(self) -> None:
        if self._proc is not None and self._proc.poll() is None:
            self._proc.kill()
            self._proc.wait()

    def close(self) -> None:
        if self._proc is None:
            return
        try:
            if self._proc.poll() is None:
                self._proc.stdin.write(json.dumps({"op": "bye"}) + "\n")
                self._proc.stdin.flush()
                self._proc.wait(timeout=10)
        except (OSError, subprocess.TimeoutExpired):
            self._kill()
        finally:
            self._kill()
            self._proc = None
            self._info = None

    # protocol ----------------------------------------------------------

    def _roundtrip(self, message: dict) -> dict:
        self._ensure_started()
        proc = self._proc
        try:
            proc.stdin.write(json.dumps(message, ensure_ascii=False) + "\n")
            proc.stdin.flush()
            line = proc.stdout.readline()
        except OSError as exc:
            self._kill()
            raise BackendError(f"backend pipe failed: {exc}") from exc
        if line == "":
            self._kill()
            raise BackendProtocolError("backend closed its output before replying")
        try:
            reply = json.loads(line)
            if not isinstance(reply, dict):
                raise ValueError("not an object")
        except ValueError as exc:
            self._kill()
            raise BackendProtocolError(
                f"malformed line from backend (killed): {line.strip()!r}"
            ) from exc
        if not reply.get("ok", False):
            raise BackendError(f"backend error: {reply.get('err', 'unspecified')}")
        return reply

    def describe(self) -> BackendInfo:
        if self._info is None:
            reply = self._roundtrip({"op": "hello"})
            name = reply.get("name")
            end_token = reply.get("end_token")
            if not isinstance(name, str) or not isinstance(end_token, str) or not end_token:
                self._kill()
                raise BackendProtocolError(f"bad hello reply: {reply!r}")
            max_len = reply.get("max_len")
            self._info = BackendInfo(name, end_token, max_len)
        return self._info

    def next(self, input_text: str, chosen_prefix: Sequence[str]) -> list[TokenCandidate]:
        self.describe()
        reply = self._roundtrip(
            {
                "op": "next",
                "input": input_text,
                "prefix": list(chosen_prefix),
                "top_k": self._top_k,
            }
        )
        raw = reply.get("candidates")
        if not isinstance(raw, list) or not raw:
            self._kill()
            raise BackendContractError(f"backend sent no candidates: {reply!r}")
        candidates = []
        for item in raw:
            try:
                candidates.append(TokenCandidate(item["t"], float(item["s"])))
            except (KeyError, TypeError, ValueError) as exc:
                self._kill()
                raise BackendContractError(f"bad candidate {item!r}: {exc}") from exc
        return candidates


@dataclass
class ProbeReport:
    """Outcome of the protocol conformance probe."""

    name: str
    end_token: str
    candidates: tuple[TokenCandidate, ...]
    checks: tuple[str, ...] = field(default=())

    def lines(self) -> list[str]:
        out = [f"backend name: {self.name}", f"end token: {self.end_token!r}"]
        out += [f"ok: {c}" for c in self.checks]
        return out


def probe_backend(command: Sequence[str] | str, probe_input: str = "probe", top_k: int = 5) -> ProbeReport:
    """Run the hello handshake plus a one-step `next` and report conformance."""
    with StdioBackend(command, top_k=top_k) as backend:
        info = backend.describe()
        candidates = backend.next(probe_input, ())
        checks = [
            "hello handshake returned name and end_token",
            f"next returned {len(candidates)} candidate(s), all non-empty with finite scores",
        ]
        return ProbeReport(info.name, info.end_token, tuple(candidates), tuple(checks))
