"""Desk-scale attentional encoder-decoder with exact gradients."""

from .vocab import BOS_ID, EOS_ID, PAD_ID, UNK_ID, Vocab
from .model import Dims, Seq2SeqModel, backward, forward, grad_check, init_model
from .training import TrainConfig, TrainingDiverged, token_accuracy, train
from .decoding import translate, translate_corpus
from .checkpoint import load_checkpoint, save_checkpoint
from .translator import Seq2SeqTranslator

__all__ = [
    "BOS_ID",
    "EOS_ID",
    "PAD_ID",
    "UNK_ID",
    "Vocab",
    "Dims",
    "Seq2SeqModel",
    "init_model",
    "forward",
    "backward",
    "grad_check",
    "TrainConfig",
    "TrainingDiverged",
    "train",
    "token_accuracy",
    "translate",
    "translate_corpus",
    "save_checkpoint",
    "load_checkpoint",
    "Seq2SeqTranslator",
]
