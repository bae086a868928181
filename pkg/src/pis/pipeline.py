"""End-to-end compression pipeline: score -> ratio -> token prune -> roulette.

Document processing is deterministic given (corpus, config, seed): every
document draws its randomness from a seed pre-spawned from the run seed and
the document's position, so worker-pool size never changes any output byte.
"""

from __future__ import annotations

import gc
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields

import numpy as np

from .errors import (
    DomainError,
    MissingField,
    MissingPolicy,
    NoReferences,
    EmptyLexicon,
    ParseError,
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
from .ratio_policy import (
    QNetwork,
    load_model,
    states_for_document,
)
from .scoring import CorpusStats, Scorer, load_encoder_records
from .segmentation import Document, make_document, _scan_tokens
from .sentence_sampler import RouletteDecision, RouletteState, roulette_step
from .token_sampler import CompressionPlan, compress_sentence, plan_to_sentence

RATIO_GRID = tuple(k / 10.0 for k in range(0, 9))
REPORT_FORMATS = ("table", "json-lines")


@dataclass
class PipelineConfig:
    """Run configuration; exactly one of ``ratio`` / ``model_path`` drives ratios."""

    ratio: float | None = None
    model_path: str | None = None
    gamma_tf: float = 0.5
    roulette_enabled: bool = True
    similarity_threshold: float = 0.9
    seed: int = 0
    records_path: str | None = None
    report_format: str = "table"

    def __post_init__(self):
        if self.ratio is not None:
            if not any(abs(self.ratio - r) < 1e-9 for r in RATIO_GRID):
                raise DomainError(
                    f"fixed ratio must be on the 0.1 grid in [0, 0.8], got {self.ratio}"
                )
            self.ratio = min(RATIO_GRID, key=lambda r: abs(self.ratio - r))
        if not 0.0 < self.similarity_threshold <= 1.0:
            raise DomainError(
                f"similarity threshold must be in (0, 1], got {self.similarity_threshold}"
            )
        if self.report_format not in REPORT_FORMATS:
            raise DomainError(f"report_format must be one of {REPORT_FORMATS}")

    @classmethod
    def from_json(cls, path: str) -> "PipelineConfig":
        with open(path, "r", encoding="utf-8") as handle:
            raw = json.load(handle)
        known = {f.name for f in fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise ParseError(f"unknown pipeline-config field '{sorted(unknown)[0]}'")
        return cls(**raw)


@dataclass
class CompressedDocument:
    doc_id: str
    original_text: str
    compressed_text: str
    plans: list[tuple[int, CompressionPlan]]
    roulette_log: list[RouletteDecision]
    report: MetricReport


def count_words(text: str) -> int:
    return sum(1 for t in _scan_tokens(text) if t.is_word)


def _word_texts(text: str) -> list[str]:
    return [t.text.lower() for t in _scan_tokens(text) if t.is_word]


def _document_report(document: Document, compressed_text: str) -> MetricReport:
    original_words = count_words(document.text)
    compressed_words = count_words(compressed_text)
    if original_words >= 1 and compressed_words >= 1:
        tau, inv_tau = compression_ratio(original_words, compressed_words)
    else:
        tau, inv_tau = None, None

    em = None
    bleu_score = None
    rouge1 = rouge2 = rouge_lcs = None
    if document.answer is not None:
        em = float(exact_match(compressed_text, document.answer))
    if document.reference is not None:
        candidate = _word_texts(compressed_text)
        reference = _word_texts(document.reference)
        bleu_score = bleu(candidate, reference)
        rouge1 = rouge_n(candidate, reference, 1)
        rouge2 = rouge_n(candidate, reference, 2)
        rouge_lcs = rouge_l(candidate, reference)
    return MetricReport(
        em=em,
        bleu=bleu_score,
        rouge1=rouge1,
        rouge2=rouge2,
        rougeL=rouge_lcs,
        compression_tau=tau,
        inv_tau=inv_tau,
    )


def compress_document(
    document: Document,
    cfg: PipelineConfig,
    scorer: Scorer,
    policy: QNetwork | None,
    rng: np.random.Generator,
) -> CompressedDocument:
    """Compress one document through all pipeline stages in order.

    Sentences without word tokens (bare punctuation) cannot be scored; they
    pass through unchanged and do not participate in the roulette.
    """
    scoreable = [s for s in document.sentences if any(t.is_word for t in s.tokens)]
    scored = [scorer.score(document.id, s) for s in scoreable]

    if cfg.ratio is not None:
        ratios = [cfg.ratio] * len(scored)
    else:
        if policy is None:
            raise MissingPolicy("policy mode requires a trained network")
        states = states_for_document([s.embedding for s in scored])
        ratios = [
            (int(np.argmax(policy.forward(state))) + 1) / 10.0 for state in states
        ]

    plans: dict[int, CompressionPlan] = {}
    compressed_sentences: dict[int, str] = {}
    embeddings: dict[int, np.ndarray] = {}
    for scored_sentence, ratio in zip(scored, ratios):
        index = scored_sentence.sentence.index
        plan = compress_sentence(scored_sentence, ratio)
        plans[index] = plan
        compressed_sentences[index] = plan_to_sentence(
            scored_sentence.sentence, plan
        ).text
        embeddings[index] = scored_sentence.embedding

    kept_texts: list[str] = []
    log: list[RouletteDecision] = []
    state = RouletteState()
    for sentence in document.sentences:
        if sentence.index not in plans:
            kept_texts.append(sentence.text)
            continue
        if not cfg.roulette_enabled:
            kept_texts.append(compressed_sentences[sentence.index])
            continue
        decision = roulette_step(
            state,
            sentence.index,
            embeddings[sentence.index],
            rng,
            cfg.similarity_threshold,
        )
        log.append(decision)
        if decision.kept:
            kept_texts.append(compressed_sentences[sentence.index])

    compressed_text = " ".join(kept_texts)
    return CompressedDocument(
        doc_id=document.id,
        original_text=document.text,
        compressed_text=compressed_text,
        plans=sorted(plans.items()),
        roulette_log=log,
        report=_document_report(document, compressed_text),
    )


def build_scorer(documents: list[Document], cfg: PipelineConfig) -> Scorer:
    stats = CorpusStats.from_documents(documents)
    records = (
        load_encoder_records(cfg.records_path) if cfg.records_path is not None else None
    )
    return Scorer(stats, records, cfg.gamma_tf)


def compress_corpus(
    documents: list[Document],
    cfg: PipelineConfig,
    policy: QNetwork | None = None,
    workers: int = 1,
) -> list[CompressedDocument]:
    """Compress a corpus with a worker pool; output is order- and thread-stable."""
    scorer = build_scorer(documents, cfg)
    if policy is None and cfg.model_path is not None:
        policy = load_model(cfg.model_path)
    if policy is None and cfg.ratio is None:
        raise MissingPolicy("configure either a fixed ratio or a policy model")

    seeds = np.random.SeedSequence(cfg.seed).spawn(len(documents))

    def run(position: int) -> tuple[int, CompressedDocument]:
        rng = np.random.default_rng(seeds[position])
        return position, compress_document(
            documents[position], cfg, scorer, policy, rng
        )

    if workers <= 1:
        results = [run(i) for i in range(len(documents))]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, range(len(documents))))
    results.sort(key=lambda item: (item[1].doc_id, item[0]))
    return [compressed for _, compressed in results]


def ingest_corpus(path: str) -> list[Document]:
    """Read a JSON Lines corpus: {"id", "text", optional "reference"/"answer"}."""
    documents: list[Document] = []
    with open(path, "r", encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                raw = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON ({exc.msg})", line_no=line_no) from exc
            if not isinstance(raw, dict):
                raise ParseError("corpus line must be a JSON object", line_no=line_no)
            for required in ("id", "text"):
                if required not in raw:
                    raise MissingField(
                        f"missing required field '{required}'",
                        field=required,
                        line_no=line_no,
                    )
                if not isinstance(raw[required], str):
                    raise MissingField(
                        f"field '{required}' must be a string",
                        field=required,
                        line_no=line_no,
                    )
            documents.append(
                make_document(
                    raw["id"],
                    raw["text"],
                    reference=raw.get("reference"),
                    answer=raw.get("answer"),
                )
            )
    return documents


def _mean_or_none(values: list[float]) -> float | None:
    return float(np.mean(values)) if values else None


def _mean_prf(scores: list[PrfScore]) -> PrfScore | None:
    if not scores:
        return None
    return PrfScore(
        precision=float(np.mean([s.precision for s in scores])),
        recall=float(np.mean([s.recall for s in scores])),
        f1=float(np.mean([s.f1 for s in scores])),
    )


def aggregate_reports(reports: list[MetricReport]) -> MetricReport:
    """Unweighted means over the documents where each metric is defined."""
    return MetricReport(
        em=_mean_or_none([r.em for r in reports if r.em is not None]),
        bleu=_mean_or_none([r.bleu for r in reports if r.bleu is not None]),
        rouge1=_mean_prf([r.rouge1 for r in reports if r.rouge1 is not None]),
        rouge2=_mean_prf([r.rouge2 for r in reports if r.rouge2 is not None]),
        rougeL=_mean_prf([r.rougeL for r in reports if r.rougeL is not None]),
        compression_tau=_mean_or_none(
            [r.compression_tau for r in reports if r.compression_tau is not None]
        ),
        inv_tau=_mean_or_none([r.inv_tau for r in reports if r.inv_tau is not None]),
    )


def evaluate(
    documents: list[Document],
    cfg: PipelineConfig,
    policy: QNetwork | None = None,
    workers: int = 1,
) -> tuple[MetricReport, list[CompressedDocument]]:
    """Compress and score a corpus against its reference/answer fields."""
    if all(d.reference is None and d.answer is None for d in documents):
        raise NoReferences(
            "evaluation needs at least one document with a 'reference' or 'answer'"
        )
    compressed = compress_corpus(documents, cfg, policy=policy, workers=workers)
    return aggregate_reports([c.report for c in compressed]), compressed


# ---------------------------------------------------------------------------
# Report rendering and serialization
# ---------------------------------------------------------------------------


def _cell(value: float | None, scale: float = 1.0, suffix: str = "") -> str:
    if value is None:
        return "-"
    return f"{value * scale:.4f}{suffix}"


def render_table(
    aggregate: MetricReport, per_document: list[tuple[str, MetricReport]]
) -> str:
    """The evaluation table: EM | BLEU | R1 | R2 | RL | 1/tau."""
    header = f"{'doc':<16}{'EM':>8}{'BLEU':>9}{'R1':>9}{'R2':>9}{'RL':>9}{'1/tau':>9}"
    lines = [header, "-" * len(header)]

    def row(label: str, report: MetricReport) -> str:
        return (
            f"{label:<16}"
            f"{_cell(report.em):>8}"
            f"{_cell(report.bleu):>9}"
            f"{_cell(report.rouge1.f1 if report.rouge1 else None):>9}"
            f"{_cell(report.rouge2.f1 if report.rouge2 else None):>9}"
            f"{_cell(report.rougeL.f1 if report.rougeL else None):>9}"
            f"{_cell(report.inv_tau, suffix='x'):>9}"
        )

    for doc_id, report in per_document:
        lines.append(row(doc_id, report))
    lines.append("-" * len(header))
    lines.append(row("aggregate", aggregate))
    return "\n".join(lines)


def _prf_to_json(score: PrfScore | None):
    if score is None:
        return None
    return {"precision": score.precision, "recall": score.recall, "f1": score.f1}


def report_to_json(report: MetricReport) -> dict:
    return {
        "em": report.em,
        "bleu": report.bleu,
        "rouge1": _prf_to_json(report.rouge1),
        "rouge2": _prf_to_json(report.rouge2),
        "rougeL": _prf_to_json(report.rougeL),
        "compression_tau": report.compression_tau,
        "inv_tau": report.inv_tau,
    }


def compressed_document_to_json(compressed: CompressedDocument) -> dict:
    return {
        "doc_id": compressed.doc_id,
        "original_text": compressed.original_text,
        "compressed_text": compressed.compressed_text,
        "plans": [
            {
                "sentence_index": index,
                "ratio_remove": plan.ratio_remove,
                "deleted_indices": sorted(plan.deleted_indices),
                "kept_word_count": plan.kept_word_count(),
            }
            for index, plan in compressed.plans
        ],
        "roulette_log": [
            {
                "index": d.index,
                "k": d.k_at_decision,
                "draw": d.draw,
                "decision": "keep" if d.kept else "delete",
            }
            for d in compressed.roulette_log
        ],
        "report": report_to_json(compressed.report),
    }


def render_compression(
    compressed: list[CompressedDocument], report_format: str
) -> str:
    if report_format == "json-lines":
        return "\n".join(
            json.dumps(compressed_document_to_json(c), sort_keys=True)
            for c in compressed
        )
    lines = []
    for c in compressed:
        inv = c.report.inv_tau
        lines.append(f"# {c.doc_id} (1/tau = {inv:.4f})" if inv else f"# {c.doc_id}")
        lines.append(c.compressed_text)
    return "\n".join(lines)


def render_evaluation(
    aggregate: MetricReport,
    compressed: list[CompressedDocument],
    report_format: str,
) -> str:
    if report_format == "json-lines":
        lines = [
            json.dumps(
                {"doc_id": c.doc_id, "report": report_to_json(c.report)},
                sort_keys=True,
            )
            for c in compressed
        ]
        lines.append(
            json.dumps(
                {"doc_id": None, "aggregate": report_to_json(aggregate)},
                sort_keys=True,
            )
        )
        return "\n".join(lines)
    return render_table(aggregate, [(c.doc_id, c.report) for c in compressed])


# ---------------------------------------------------------------------------
# Noise injection and latency probe
# ---------------------------------------------------------------------------

DEFAULT_NOISE_LEXICON = (
    "apple", "window", "quantum", "gravel", "mirror", "lantern", "velvet",
    "thunder", "cedar", "prism", "harbor", "nickel", "orbit", "saffron",
    "timber", "glacier", "ember", "walnut", "fathom", "sienna", "drizzle",
    "copper", "meadow", "anchor", "bramble", "quartz", "raven", "sonnet",
    "tundra", "violet", "willow", "zephyr",
)


def inject_noise(
    text: str,
    n_words: int,
    lexicon: list[str],
    rng: np.random.Generator,
) -> str:
    """Insert ``n_words`` random lexicon words at random word boundaries.

    The original words survive in order as a subsequence.  With n_words=0 the
    text is returned untouched; otherwise whitespace is normalized to single
    spaces.
    """
    if not lexicon:
        raise EmptyLexicon("noise injection needs a non-empty lexicon")
    if n_words == 0:
        return text
    words = text.split()
    for _ in range(n_words):
        noise_word = lexicon[int(rng.integers(0, len(lexicon)))]
        position = int(rng.integers(0, len(words) + 1))
        words.insert(position, noise_word)
    return " ".join(words)


_PROBE_SENTENCE_WORDS = 20


def synthesize_document(doc_id: str, n_words: int) -> Document:
    """Deterministic document with exactly ``n_words`` word tokens.

    Words are all distinct, so every sentence is dissimilar to every other:
    the roulette store grows to its worst case and timing is comparable
    across lengths.
    """
    words = [f"term{i}" for i in range(n_words)]
    sentences = [
        " ".join(words[i : i + _PROBE_SENTENCE_WORDS]) + "."
        for i in range(0, len(words), _PROBE_SENTENCE_WORDS)
    ]
    return make_document(doc_id, " ".join(sentences))


def latency_probe(
    lengths: list[int],
    cfg: PipelineConfig | None = None,
    repeats: int = 5,
    inner: int = 5,
) -> list[dict]:
    """Median wall time of ``compress_document`` per input length.

    Hermetic: runs on the fallback scorer regardless of configured records.
    Each of the ``repeats`` samples times ``inner`` consecutive compressions
    and divides, so single-digit-millisecond runs are not at the mercy of
    scheduler jitter.
    """
    if cfg is None:
        cfg = PipelineConfig(ratio=0.7)
    rows = []
    gc_was_enabled = gc.isenabled()
    gc.disable()
    try:
        for length in lengths:
            document = synthesize_document(f"probe-{length}", length)
            scorer = build_scorer([document], cfg)
            samples = []
            # warm-up run excluded from timing
            compress_document(
                document, cfg, scorer, None, np.random.default_rng(cfg.seed)
            )
            for _ in range(repeats):
                gc.collect()
                start = time.perf_counter()
                for _ in range(inner):
                    compress_document(
                        document, cfg, scorer, None, np.random.default_rng(cfg.seed)
                    )
                samples.append((time.perf_counter() - start) / inner)
            rows.append(
                {
                    "tokens": length,
                    "seconds": float(np.median(samples)),
                    "samples": samples,
                }
            )
    finally:
        if gc_was_enabled:
            gc.enable()
    return rows


def linear_fit_r_squared(xs: list[float], ys: list[float]) -> float:
    """R^2 of the least-squares line through (xs, ys)."""
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    slope, intercept = np.polyfit(x, y, 1)
    predicted = slope * x + intercept
    residual = float(np.sum((y - predicted) ** 2))
    total = float(np.sum((y - y.mean()) ** 2))
    if total == 0.0:
        return 1.0
    return 1.0 - residual / total
