"""Sentence and token segmentation with exact spans.

Every sentence records its [start, end) character span in the document, and
every token its span in the sentence, so nothing is lost or invented.
"""

from pis import detokenize, make_document

text = "The council met today. Mr. Smith spoke; nobody objected! Let's adjourn."
doc = make_document("demo", text)

print(f"document: {text!r}\n")
for sentence in doc.sentences:
    start, end = sentence.char_span
    print(f"sentence {sentence.index}: {sentence.text!r}  span=[{start},{end})")
    for token in sentence.tokens:
        print(f"    {token.kind:<12} {token.text!r}")

# The punctuation-only delimiter rule happily splits "Mr." -- a documented
# trade-off of staying deterministic and dependency-free.

# Deleting tokens and re-joining keeps word spacing tidy:
sentence = doc.sentences[3]
kept = [t for t in sentence.tokens if t.text != "adjourn"]
print("\nafter deleting 'adjourn':", repr(detokenize(kept, sentence)))
