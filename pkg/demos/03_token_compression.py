"""Token-level importance sampling at a sweep of removal ratios.

High attention variance pushes a token toward deletion; a high corrective
weight protects it.  Exactly floor(ratio * n_words) words go (never all), and
punctuation survives unless orphaned on both sides.
"""

from pis import CorpusStats, achieved_rho, compress_sentence, fallback_scores, make_document, plan_to_sentence

doc = make_document(
    "demo",
    "The committee reviewed the annual housing budget, debated the transit plan, and approved a zoning amendment today.",
)
stats = CorpusStats.from_documents([doc])
scored = fallback_scores(doc.sentences[0], stats)
n_words = len(doc.sentences[0].word_tokens())

print("original:", doc.text, f"({n_words} words)\n")
for grid in range(0, 9, 2):
    ratio = grid / 10
    plan = compress_sentence(scored, ratio)
    rho = achieved_rho(plan, n_words)
    print(f"remove {ratio:.1f} (kept {rho:.2f}): {plan_to_sentence(doc.sentences[0], plan).text}")
