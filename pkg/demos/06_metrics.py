"""The evaluation metrics, straight from token lists."""

from pis import bleu, compression_ratio, exact_match, rouge_l, rouge_n

candidate = "the council approved the budget".split()
reference = "the city council approved the annual budget today".split()

for name, score in [
    ("ROUGE-1", rouge_n(candidate, reference, 1)),
    ("ROUGE-2", rouge_n(candidate, reference, 2)),
    ("ROUGE-L", rouge_l(candidate, reference)),
]:
    print(f"{name}: P={score.precision:.3f} R={score.recall:.3f} F1={score.f1:.3f}")

print(f"BLEU: {bleu(candidate, reference):.4f}")
print("EM('The Budget.', 'budget') =", exact_match("The Budget.", "budget"))

tau, inv_tau = compression_ratio(len(reference), len(candidate))
print(f"compression: tau={tau:.3f} ({inv_tau:.2f}x)")
