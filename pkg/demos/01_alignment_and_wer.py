"""Word-level alignment, WER, and the matched-pairs significance test.

Run:  python3 demos/01_alignment_and_wer.py
"""

from nbrescore import align, corpus_wer, matched_pairs_test, wer

ref = "the cat sat on the mat".split()
hyp = "the cat sat in the hat today".split()

result = align(ref, hyp)
print(f"reference:  {' '.join(ref)}")
print(f"hypothesis: {' '.join(hyp)}")
print(f"edit distance {result.distance}: "
      f"{result.substitutions} sub, {result.insertions} ins, {result.deletions} del")
print("operations:", " ".join(op.name for op in result.aligned_ops))

w = wer(ref, hyp)
print(f"\nutterance WER = {w.errors}/{w.ref_words} = {w.wer:.3f}")

pairs = [
    (ref, hyp),
    ("hello world".split(), "hello world".split()),
    ("a b c d".split(), "a b x d".split()),
]
summary = corpus_wer(pairs)
print(f"corpus WER over {len(pairs)} utterances = "
      f"{summary.errors}/{summary.ref_words} = {summary.wer:.3f}")

# Compare two systems by their per-utterance error counts.
system_a = [3, 1, 4, 1, 5, 0, 2, 1, 0, 3]
system_b = [2, 1, 3, 1, 5, 0, 1, 1, 0, 2]
sig = matched_pairs_test(system_a, system_b)
print(f"\nmatched pairs: z = {sig.z_statistic:.3f}, p = {sig.p_value:.4f}, "
      f"n = {sig.n_segments}")
