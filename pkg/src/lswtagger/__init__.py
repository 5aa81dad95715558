"""Sliding Window and Light Sliding Window part-of-speech taggers.

Unsupervised estimation of effective counts over context windows, tag-bigram
forbid/enforce rules for the light variant, and a first-order HMM baseline.
"""

__version__ = "0.1.0"

from .core import (
    EOS,
    AmbiguityInventory,
    FormatError,
    Lexicon,
    TaggerError,
    TagInventory,
    WindowSpec,
    intern_class,
    tag_sequences,
    tags_of,
)
from .corpus import AmbiguousText, Token, analyze, corpus_stats, count_windows, read_corpus, read_gold
from .evaluate import EvalReport, LearningCurve, TaggerConfig, accuracy, learning_curve, tag_text
from .hmm import HmmModel, hmm_init, hmm_tag, hmm_train
from .lsw import LswModel, lsw_init, lsw_iterate, lsw_tag, lsw_train
from .report import emit
from .rules import RuleSet, is_valid, parse_rules, read_rules, valid_sequences
from .serialize import load_model, save_model
from .sw import SwModel, sw_init, sw_iterate, sw_tag, sw_train
from .synthetic import SyntheticSpec, generate_synthetic, read_synthetic
