"""End to end: ingest a corpus, compress it, evaluate against references.

The same thing is available from the shell:

    pis compress corpus.jsonl --ratio 0.3 --seed 7 --out compressed.txt
    pis evaluate corpus.jsonl --ratio 0.3 --seed 7
    pis noise --text "Which is larger, 9.9 or 9.11?" --n-words 10
"""

import json
import os
import tempfile

import numpy as np

from pis import PipelineConfig, compress_corpus, evaluate, ingest_corpus, inject_noise
from pis.pipeline import DEFAULT_NOISE_LEXICON, render_evaluation

lines = [
    {"id": "m1", "text": "The council reviewed the annual housing budget today. "
                          "Members debated the transit funding plan at length. "
                          "Members debated the transit funding plan at length. "
                          "The committee then approved a zoning amendment.",
     "reference": "council reviewed housing budget and approved zoning amendment"},
    {"id": "q1", "text": "The capital of France has been Paris for centuries. "
                          "Many tourists visit the city every single year.",
     "answer": "Paris"},
]

with tempfile.TemporaryDirectory() as tmp:
    corpus_path = os.path.join(tmp, "corpus.jsonl")
    with open(corpus_path, "w") as handle:
        for line in lines:
            handle.write(json.dumps(line) + "\n")

    documents = ingest_corpus(corpus_path)
    cfg = PipelineConfig(ratio=0.3, seed=7)

    for compressed in compress_corpus(documents, cfg):
        print(f"[{compressed.doc_id}] {compressed.compressed_text}")
        deleted = [d.index for d in compressed.roulette_log if not d.kept]
        if deleted:
            print(f"    roulette removed sentences {deleted}")

    aggregate, per_doc = evaluate(documents, cfg)
    print("\n" + render_evaluation(aggregate, per_doc, "table"))

# the pre-experiment utility: plant random words and watch a prompt degrade
noisy = inject_noise(
    "Which is larger, 9.9 or 9.11?", 10, list(DEFAULT_NOISE_LEXICON), np.random.default_rng(0)
)
print("\nnoise-injected prompt:", noisy)
