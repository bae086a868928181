"""Russian-roulette dedup over a stream of near-duplicate sentences.

The first copy is free.  Every further near-duplicate (cosine >= 0.9 against
anything kept) faces deletion odds k/6 that ratchet up with each consecutive
hit and reset on deletion or on a dissimilar sentence.
"""

import numpy as np

from pis import CorpusStats, fallback_scores, filter_document, make_document

text = " ".join(["The quarterly report shows steady progress."] * 8 + ["Funding is flat."])
doc = make_document("demo", text)
stats = CorpusStats.from_documents([doc])
items = [(s, fallback_scores(s, stats).embedding) for s in doc.sentences]

kept, log = filter_document(items, np.random.default_rng(7))

for decision in log:
    draw = "-" if decision.draw is None else f"{decision.draw:.3f}"
    verdict = "keep" if decision.kept else "DELETE"
    print(f"sentence {decision.index}: k={decision.k_at_decision} draw={draw} -> {verdict}")
print(f"\nkept {len(kept)} of {len(items)} sentences")
