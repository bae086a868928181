"""Token importance scores without any model.

The fallback scorer turns idf and token length into a softmax salience, and
hashes word tokens into a deterministic 768-dim sentence embedding.  Each
token's corrective weight = attention * tf_share^gamma * idf protects
frequent, salient terms from deletion later.
"""

import numpy as np

from pis import CorpusStats, fallback_scores, make_document

corpus = [
    make_document("d0", "The committee reviewed the housing budget. The budget passed."),
    make_document("d1", "Transit funding was debated. The debate ran long."),
]
stats = CorpusStats.from_documents(corpus)

sentence = corpus[0].sentences[0]
scored = fallback_scores(sentence, stats, gamma_tf=0.5)

print(f"{'token':<12}{'attention':>10}{'variance':>10}{'tf_share':>10}{'idf':>8}{'weight':>10}")
for token, score in zip(sentence.word_tokens(), scored.scores):
    print(
        f"{token.text:<12}{score.attention_mean:>10.4f}{score.attention_variance:>10.4f}"
        f"{score.tf_share:>10.3f}{score.idf:>8.3f}{score.weight:>10.4f}"
    )

print("\nattention sums to", sum(s.attention_mean for s in scored.scores))
print("embedding shape", scored.embedding.shape, "norm", np.linalg.norm(scored.embedding))
