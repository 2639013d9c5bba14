"""N-best list rescoring by pairwise semantic comparison.

A library + CLI for rescoring speech-recognition N-best lists: per-pair
feature vectors from word embeddings and decoder scores, a trainable
binary comparator, all-pairs tournament aggregation, hypothesis selection,
and the matching evaluation tooling (WER, oracle/baseline/random
selectors, matched-pairs significance).
"""

from .embeddings import EmbeddingTable, cosine_similarity, load_embeddings_text, lookup, mean_vector
from .features import EQUAL, FeatureConfig, PairSample, Variant, decompose, generate_pairs, label_pair
from .mlp import MlpParams, MlpSpec, TrainConfig, bce_loss, forward, grad_check, init_mlp, train
from .nbest import Corpus, Hypothesis, NBestList, parse_corpus, truncate_lists, write_corpus
from .scorers import ConstantScorer, ExternalScorer, NativeScorer
from .synth import SynthConfig, generate
from .tournament import (
    SelectionWeights,
    TournamentResult,
    baseline_select,
    combine_scores,
    grid_search_weights,
    random_select,
    select_tournament,
    tournament_scores,
)
from .wer import align, corpus_wer, matched_pairs_test, oracle_select, wer

__version__ = "0.1.0"
