"""Protocol loop: JSON lines in, next-token candidates out.

Messages, one per line, UTF-8:

    {"op": "hello"}                                  -> {"ok": true, "name", "end_token"}
    {"op": "next", "input", "prefix", "top_k"}       -> {"ok": true, "candidates": [{"t", "s"}]}
    {"op": "bye"}                                    -> (exit)

Candidate token strings are tokenizer *surface forms*: each one is the
text the chosen token appends to the decoded output, so the engine can
reconstruct the output by plain concatenation. The `prefix` the engine
sends is the list of surface strings already chosen; ids are recovered
from a per-item cache of what this process itself offered, falling back
to encoding the surface (which is how a forced token the model never
proposed, like the opening mark, enters the sequence).

Per-request failures answer {"ok": false, "err": ...} and keep the
session alive; an unloadable model exits nonzero before the handshake.
Nothing but protocol lines is ever written to stdout.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from typing import Sequence

import torch
from transformers import AutoModelForSeq2SeqLM, AutoTokenizer
from transformers.utils import logging as hf_logging


@dataclass(frozen=True)
class BridgeConfig:
    model: str
    device: str = "cpu"
    top_k: int = 5
    max_input_length: int = 256
    max_output_length: int = 400


class _Session:
    def __init__(self, config: BridgeConfig):
        self.config = config
        self.tokenizer = AutoTokenizer.from_pretrained(config.model)
        self.model = AutoModelForSeq2SeqLM.from_pretrained(config.model)
        self.model.to(config.device)
        self.model.eval()
        eos = self.tokenizer.eos_token
        if not eos:
            raise ValueError("model tokenizer defines no end-of-sequence token")
        self.end_token: str = eos
        self.eos_id: int = self.tokenizer.eos_token_id
        start = self.model.config.decoder_start_token_id
        if start is None:
            start = self.model.config.pad_token_id
        if start is None:
            raise ValueError("model defines neither decoder_start_token_id nor pad_token_id")
        self.start_id: int = start
        # surface-prefix tuple -> decoder token ids; reset per decoded item
        self._prefix_ids: dict[tuple[str, ...], list[int]] = {(): []}

    def name(self) -> str:
        return f"hf:{self.config.model.rstrip('/').rsplit('/', 1)[-1]}"

    def _decode(self, ids: Sequence[int]) -> str:
        return self.tokenizer.decode(
            list(ids), skip_special_tokens=False, clean_up_tokenization_spaces=False
        )

    def _resolve_prefix(self, prefix: tuple[str, ...]) -> list[int]:
        if prefix in self._prefix_ids:
            return self._prefix_ids[prefix]
        head = self._resolve_prefix(prefix[:-1])
        # Unseen surface (a forced token): tokenize it into the stream.
        tail = self.tokenizer(prefix[-1], add_special_tokens=False)["input_ids"]
        ids = head + list(tail)
        self._prefix_ids[prefix] = ids
        return ids

    def _surface(self, prefix_ids: list[int], token_id: int) -> str:
        if token_id == self.eos_id:
            return self.end_token
        base = self._decode(prefix_ids)
        full = self._decode(prefix_ids + [token_id])
        if full.startswith(base):
            return full[len(base) :]
        return self._decode([token_id])

    def next_candidates(self, input_text: str, prefix: Sequence[str], top_k: int) -> list[dict]:
        prefix = tuple(prefix)
        if not prefix:
            self._prefix_ids = {(): []}  # new item: drop the previous chain
        prefix_ids = self._resolve_prefix(prefix)
        if len(prefix_ids) > self.config.max_output_length:
            raise ValueError(
                f"decoder prefix exceeds max output length {self.config.max_output_length}"
            )

        encoded = self.tokenizer(
            input_text,
            return_tensors="pt",
            truncation=True,
            max_length=self.config.max_input_length,
        ).to(self.config.device)
        decoder_input_ids = torch.tensor(
            [[self.start_id, *prefix_ids]], dtype=torch.long, device=self.config.device
        )
        with torch.no_grad():
            logits = self.model(
                input_ids=encoded["input_ids"],
                attention_mask=encoded.get("attention_mask"),
                decoder_input_ids=decoder_input_ids,
            ).logits[0, -1]

        k = max(1, min(top_k, logits.shape[-1]))
        top = torch.topk(logits, k=k)
        candidates = []
        for score, token_id in zip(top.values.tolist(), top.indices.tolist()):
            surface = self._surface(prefix_ids, token_id)
            if not surface:
                continue  # token adds no text; unrepresentable on the wire
            candidates.append({"t": surface, "s": float(score)})
            self._prefix_ids[prefix + (surface,)] = prefix_ids + [token_id]
        if not candidates:
            candidates = [{"t": self.end_token, "s": float(top.values[0])}]
        return candidates


def _reply(obj: dict) -> None:
    sys.stdout.write(json.dumps(obj, ensure_ascii=False) + "\n")
    sys.stdout.flush()


def serve(config: BridgeConfig) -> int:
    """Load the model, then answer protocol messages until "bye"."""
    hf_logging.set_verbosity_error()
    try:
        session = _Session(config)
    except Exception as exc:  # unloadable model: fail before the handshake
        print(f"cannot load model {config.model!r}: {exc}", file=sys.stderr)
        return 2

    for line in sys.stdin:
        line = line.strip()
        if not line:
            continue
        try:
            message = json.loads(line)
            op = message["op"]
        except (ValueError, KeyError, TypeError):
            _reply({"ok": False, "err": f"unintelligible message: {line[:200]}"})
            continue
        if op == "hello":
            _reply({"ok": True, "name": session.name(), "end_token": session.end_token})
        elif op == "next":
            try:
                candidates = session.next_candidates(
                    message["input"],
                    message.get("prefix", []),
                    int(message.get("top_k", config.top_k)),
                )
                _reply({"ok": True, "candidates": candidates})
            except Exception as exc:  # keep the session alive
                _reply({"ok": False, "err": str(exc)})
        elif op == "bye":
            break
        else:
            _reply({"ok": False, "err": f"unknown op {op!r}"})
    return 0


def main(argv: Sequence[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="slg-hf-bridge",
        description="Serve next-token candidates from a local seq2seq checkpoint "
        "over the stdio backend protocol",
    )
    parser.add_argument("--model", required=True, help="model directory or identifier")
    parser.add_argument("--device", default="cpu")
    parser.add_argument("--top-k", type=int, default=5)
    parser.add_argument("--max-input-length", type=int, default=256)
    parser.add_argument("--max-output-length", type=int, default=400)
    args = parser.parse_args(argv)
    return serve(
        BridgeConfig(
            model=args.model,
            device=args.device,
            top_k=args.top_k,
            max_input_length=args.max_input_length,
            max_output_length=args.max_output_length,
        )
    )


if __name__ == "__main__":
    sys.exit(main())
