"""Sentence-to-label generation toolkit.

Turns jointly annotated sentences (one class label plus ordered entity
label/span pairs) into seq2seq prompt text and back: format conversion,
grammar-checked output parsing, strict exact-match accuracy metrics, and a
constrained greedy decode engine over pluggable token backends.
"""

__version__ = "0.1.0"

from .records import (
    DEFAULT_NER_LABELS,
    DEFAULT_SC_LABELS,
    NEGATIVE_LABEL,
    RESERVED_CHARS,
    Entity,
    NerLabelVocab,
    ScLabelVocab,
    ScnmRecord,
    negative_entity,
    validate_record,
)
from .formats import (
    CANONICAL_FORMAT,
    ConversionError,
    FormatId,
    IoPair,
    convert_il_pair,
    convert_ner_only,
    convert_pair_sc,
    convert_sc_only,
    convert_scnm,
)
from .parsing import ParsedOutput, check_format, parse_output
from .metrics import (
    EmptyEvaluationError,
    GoldFormatError,
    Judgment,
    MetricsReport,
    RunCounts,
    aggregate,
    average_runs,
    evaluate,
    judge_example,
    percent,
    render_table,
)
from .datasets import (
    DatasetError,
    DatasetFile,
    IlPairRecord,
    PairScRecord,
    SplitSpec,
    coarsen_sts,
    load,
    sample_few_shot,
    save,
    shuffled_indices,
    split,
    sts_grid,
)
from .decoding import (
    DEFAULT_MAX_LEN,
    Backend,
    BackendContractError,
    BackendError,
    BackendInfo,
    BackendProtocolError,
    ConstraintSpec,
    DecodedPair,
    DecodeError,
    DecodeResult,
    DecodeStep,
    FirstTokenNoiseBackend,
    RecordingBackend,
    StdioBackend,
    TableBackend,
    TokenCandidate,
    batch_decode,
    decode,
    probe_backend,
)

__all__ = [name for name in dir() if not name.startswith("_")]
