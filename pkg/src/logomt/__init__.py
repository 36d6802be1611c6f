"""Sub-character machine translation toolkit for logographic scripts.

Characters are rewritten as ideograph or stroke sequences through an
invertible encoding, segmented with BPE, and translated with a compact
attentional encoder-decoder. Evaluation utilities cover BLEU and paired
bootstrap significance testing, and a pipeline module plus `logomt` CLI
tie the stages into reproducible experiments.
"""

from .bpe import BpeModel, BpeSegmenter
from .decomposition import (
    DecompositionTable,
    SubcharEncoder,
    coverage_stats,
    decode_text,
    decompose_char,
    encode_text,
    load_table,
)
from .metrics import bleu, bootstrap_significance
from .nmt import Seq2SeqTranslator
from .pipeline import ExperimentConfig, ParallelCorpus, run_experiment, stats_report
from .units import UnitStream

__version__ = "0.1.0"

__all__ = [
    "BpeModel",
    "BpeSegmenter",
    "DecompositionTable",
    "ExperimentConfig",
    "ParallelCorpus",
    "Seq2SeqTranslator",
    "SubcharEncoder",
    "UnitStream",
    "bleu",
    "bootstrap_significance",
    "coverage_stats",
    "decode_text",
    "decompose_char",
    "encode_text",
    "load_table",
    "run_experiment",
    "stats_report",
    "__version__",
]
