"""End-to-end pipeline on a small synthetic benchmark.

Generates noisy N-best lists with a topic-clustered embedding table,
trains the pairwise comparator, runs the all-pairs tournament, and
compares random / baseline / rescored / oracle selection.

Run:  python3 demos/03_train_and_rescore.py   (~20 s)
"""

import numpy as np

from nbrescore import (
    Corpus,
    FeatureConfig,
    MlpSpec,
    NativeScorer,
    SelectionWeights,
    SynthConfig,
    TrainConfig,
    Variant,
    baseline_select,
    corpus_wer,
    generate,
    generate_pairs,
    grid_search_weights,
    oracle_select,
    random_select,
    select_tournament,
    train,
)
from nbrescore.tournament import rescore_corpus

cfg = SynthConfig(n_utts=400, n_topics=6, words_per_topic=30, sentence_len=8,
                  n_best=10, error_rate=0.2, offtopic_rate=0.5,
                  score_noise_sigma=2.5, embedding_dim=16, seed=1)
corpus, table = generate(cfg)
train_c = Corpus(corpus.lists[:320])
test_c = Corpus(corpus.lists[320:])

config = FeatureConfig(Variant.CONFIG1, cfg.embedding_dim)
samples = list(generate_pairs(train_c, config, table, mode="train"))
x = np.array([s.features for s in samples])
y = np.array([s.label for s in samples], dtype=np.float64)
print(f"training on {len(samples)} labeled pairs ({config.length} features each)")
params, curve = train((x, y), MlpSpec(config.length), TrainConfig())
print(f"loss {curve[0]:.4f} -> {curve[-1]:.4f} over {len(curve)} epochs")

scorer = NativeScorer(params, config)
results = rescore_corpus(test_c, scorer, table)


def report(name, select):
    s = corpus_wer((l.reference, l.hypotheses[select(l)].tokens) for l in test_c)
    print(f"  {name:<22} {100 * s.wer:5.2f}%  ({s.errors}/{s.ref_words})")


weights = SelectionWeights(alpha=1.0, beta=1.0)
print("\ntest-set WER:")
report("random", lambda l: random_select(l, seed=0))
report("baseline (ac+lm)", lambda l: baseline_select(l, weights))
report("tournament rescoring", lambda l: select_tournament(results[l.utt_id], l))
report("oracle", oracle_select)

best, summary = grid_search_weights(train_c, scorer, table)
print(f"\ngrid-searched combination weights: alpha={best.alpha} beta={best.beta} "
      f"lam={best.lam} (train WER {100 * summary.wer:.2f}%)")
