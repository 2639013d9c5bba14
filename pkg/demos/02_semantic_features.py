"""Context/possibility decomposition and pairwise feature vectors.

Every N-best list splits into a *context part* (the multiset of words all
hypotheses agree on) and per-hypothesis *possibility zones* (where they
disagree).  Mean embedding vectors of those parts feed the pairwise
feature configurations.

Run:  python3 demos/02_semantic_features.py
"""

import numpy as np

from nbrescore import EmbeddingTable, FeatureConfig, Variant, decompose, label_pair
from nbrescore.features import build_features, possibility_vector, context_vector
from nbrescore.nbest import Corpus, Hypothesis, NBestList

table = EmbeddingTable(dim=2, entries={
    "the": np.array([1.0, 0.0]),
    "cat": np.array([0.9, 0.1]),
    "sat": np.array([0.8, 0.2]),
    "hat": np.array([0.7, 0.3]),
    "mat": np.array([0.6, 0.4]),
})

lst = NBestList(
    utt_id="demo",
    hypotheses=(
        Hypothesis(("the", "cat", "sat"), ac_logscore=-2.0, lm_logscore=-3.0, rank=1),
        Hypothesis(("the", "hat", "sat"), ac_logscore=-4.0, lm_logscore=-2.5, rank=2),
        Hypothesis(("the", "mat", "sat"), ac_logscore=-5.0, lm_logscore=-4.0, rank=3),
    ),
    reference=("the", "cat", "sat"),
)

dec = decompose(lst)
print("context part:", dict(dec.context_words), f"(nbrw_context = {dec.nbrw_context})")
for k, zone in enumerate(dec.possibility_words):
    print(f"  zone of hypothesis {k}: {dict(zone)}")

v_ctx = context_vector(dec, table)
print("\ncontext vector:", v_ctx)
for k in range(3):
    print(f"possibility vector {k}:", possibility_vector(dec, k, table))

for variant in (Variant.CONFIG1, Variant.CONFIG2, Variant.CONFIG3):
    config = FeatureConfig(variant, table.dim)
    feats = build_features(lst, 0, 1, table, config)
    print(f"\n{variant.name} ({config.length} features): {np.round(feats, 4)}")

print("\npair label (hyp 0 vs hyp 1):", label_pair(lst.reference,
      lst.hypotheses[0].tokens, lst.hypotheses[1].tokens))
