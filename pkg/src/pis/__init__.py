"""pis: importance-sampling prompt compression.

Token-level pruning driven by attention statistics corrected with TF-IDF,
a DDQN policy that picks per-sentence compression ratios, and russian-roulette
sentence dedup, plus the metrics and pipeline that tie them together.
"""

from .segmentation import (
    Document,
    Sentence,
    Token,
    detokenize,
    make_document,
    split_sentences,
    tokenize,
)
from .scoring import (
    CorpusStats,
    EncoderRecord,
    ScoredSentence,
    Scorer,
    TokenScore,
    compute_idf,
    compute_tf,
    corrective_weight,
    fallback_scores,
    load_encoder_records,
    score_sentence,
)
from .token_sampler import (
    CompressionPlan,
    achieved_rho,
    compress_sentence,
    deletion_priority,
    plan_to_sentence,
)
from .sentence_sampler import (
    RouletteDecision,
    RouletteState,
    cosine_similarity,
    deletion_probability,
    filter_document,
    is_similar,
    roulette_step,
)
from .ratio_policy import (
    QNetwork,
    ReplayBuffer,
    TrainConfig,
    Transition,
    action_to_ratio,
    build_state,
    ddqn_target,
    decay_epsilon,
    load_model,
    reward,
    save_model,
    select_action,
    train,
)
from .metrics import (
    MetricReport,
    PrfScore,
    bleu,
    compression_ratio,
    exact_match,
    rouge_l,
    rouge_n,
)
from .pipeline import (
    CompressedDocument,
    PipelineConfig,
    compress_corpus,
    compress_document,
    evaluate,
    ingest_corpus,
    inject_noise,
    latency_probe,
)

__version__ = "0.1.0"
