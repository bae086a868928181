"""Train the DDQN ratio policy on a tiny corpus and reuse the saved model.

One episode walks one document; the reward trades compression against
ROUGE-1 and BLEU retention.  The run below shrinks the schedule so it
finishes in seconds; drop the overrides for the reference schedule
(20 episodes, batch 32, the full 9-layer network).
"""

import tempfile

import numpy as np

from pis import CorpusStats, Scorer, TrainConfig, load_model, make_document, save_model, train

corpus = [
    # one meeting-ish document is enough to see the loop run
    make_document(
        "doc0",
        "The council reviewed the annual housing budget. Members debated transit funding. "
        "The committee approved a zoning amendment. Public comments ran long. "
        "Staff presented the safety report. The resolution passed on a split vote.",
    )
]
scorer = Scorer(CorpusStats.from_documents(corpus))
cfg = TrainConfig(episodes=6, batch_size=4)

policy, log = train(corpus, scorer, cfg, np.random.default_rng(0), widths=(768, 64, 32, 8))
for stats in log:
    print(f"episode {stats.episode}: mean reward {stats.mean_reward:+.3f} epsilon {stats.epsilon:.3f}")

with tempfile.NamedTemporaryFile(suffix=".bin") as handle:
    save_model(policy, handle.name)
    reloaded = load_model(handle.name)
    state = np.random.default_rng(1).normal(size=768)
    print("\nsaved and reloaded; Q-values identical:", np.array_equal(policy.forward(state), reloaded.forward(state)))
