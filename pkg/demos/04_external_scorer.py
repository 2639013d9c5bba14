"""Driving an external pair scorer over the stdio JSON-lines protocol.

Any child process that speaks the protocol can replace the built-in
comparator: handshake, then one {"id", "op": "score_pair", "hyp_a",
"hyp_b"} request per line answered by {"id", "v"}.  This demo uses the
in-repo reference stub; the TypeScript service in scorer-service/
implements the same contract.

Run:  python3 demos/04_external_scorer.py
"""

import sys
from pathlib import Path

from nbrescore import ExternalScorer
from nbrescore.nbest import Hypothesis, NBestList
from nbrescore.tournament import select_tournament, tournament_scores

stub = Path(__file__).resolve().parent.parent / "tests" / "stub_scorer.py"

lst = NBestList(
    utt_id="demo",
    hypotheses=(
        Hypothesis(("the", "cat", "sat"), ac_logscore=-2.0, lm_logscore=-3.0, rank=1),
        Hypothesis(("the", "marker", "sat"), ac_logscore=-4.0, lm_logscore=-2.5, rank=2),
        Hypothesis(("a", "dog", "ran"), ac_logscore=-5.0, lm_logscore=-4.0, rank=3),
    ),
)

# "marker <word>" mode: the stub favours whichever hypothesis contains the word
with ExternalScorer([sys.executable, str(stub), "marker", "marker"]) as scorer:
    v = scorer.score_pair(("the", "marker", "sat"), ("the", "cat", "sat"))
    print(f"single pair verdict: v = {v}")

    result = tournament_scores(lst, scorer)
    print("tournament scores:", [round(s, 2) for s in result.scores])
    chosen = select_tournament(result, lst)
    print("selected hypothesis:", " ".join(lst.hypotheses[chosen].tokens))
