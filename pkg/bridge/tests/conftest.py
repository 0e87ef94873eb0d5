from __future__ import annotations

import random
from pathlib import Path

import pytest
import torch
from tokenizers import Tokenizer, decoders, models
from tokenizers.pre_tokenizers import Split
from transformers import PreTrainedTokenizerFast, T5Config, T5ForConditionalGeneration

from slgkit import Entity, FormatId, NerLabelVocab, ScLabelVocab, ScnmRecord, convert_scnm


def build_toy_checkpoint(directory: Path, charset: set[str]) -> None:
    """Write a tiny random-weight seq2seq checkpoint with a character-level
    tokenizer covering ``charset``; concatenating decoded tokens reproduces
    the text exactly."""
    vocab = {"<pad>": 0, "</s>": 1, "<unk>": 2}
    for ch in sorted(charset):
        vocab.setdefault(ch, len(vocab))
    tokenizer = Tokenizer(models.WordLevel(vocab, unk_token="<unk>"))
    tokenizer.pre_tokenizer = Split(pattern="", behavior="isolated")
    tokenizer.decoder = decoders.Fuse()
    fast = PreTrainedTokenizerFast(
        tokenizer_object=tokenizer,
        pad_token="<pad>",
        eos_token="</s>",
        unk_token="<unk>",
    )
    config = T5Config(
        vocab_size=len(vocab),
        d_model=32,
        d_kv=8,
        d_ff=64,
        num_layers=2,
        num_decoder_layers=2,
        num_heads=2,
        decoder_start_token_id=0,
        pad_token_id=0,
        eos_token_id=1,
    )
    torch.manual_seed(20240)
    model = T5ForConditionalGeneration(config)
    model.save_pretrained(directory)
    fast.save_pretrained(directory)


@pytest.fixture(scope="session")
def io_pairs():
    sc_vocab = ScLabelVocab()
    ner_vocab = NerLabelVocab()
    rng = random.Random(5)
    words = "aki hana kawa mori sora tori umi yama yuki machi".split()
    pairs = []
    for i in range(10):
        sentence = " ".join(rng.choice(words) for _ in range(5)) + f" no{i}"
        record = ScnmRecord(
            id=f"b{i}",
            sentence=sentence,
            sc_label=rng.choice(sc_vocab.labels),
            entities=(Entity(rng.choice(ner_vocab.labels[:-1]), sentence.split()[0]),),
        )
        pairs.append(convert_scnm(record, FormatId.F5, sc_vocab, ner_vocab))
    return pairs


@pytest.fixture(scope="session")
def checkpoint(tmp_path_factory, io_pairs) -> Path:
    directory = tmp_path_factory.mktemp("toy-checkpoint")
    charset = set("".join(p.input_text + p.target_text for p in io_pairs))
    build_toy_checkpoint(directory, charset)
    return directory
