"""
Reading corpora and moving between label schemes
=================================================

PubTator and CoNLL files are parsed into documents with character offsets.
Offsets always index the document text, so a span's surface is a plain slice.
"""

import io
from dataclasses import replace

from seqtag.corpus import EntityType, Split, encode_iobes, decode_iobes, document_tokens, parse_conll, parse_pubtator, write_jsonl

pubtator = """\
17|t|Mutations in TP53 cause Li-Fraumeni syndrome
17|a|Carriers of TP53 variants develop tumours early.
17\t13\t17\tTP53\tGene
17\t24\t44\tLi-Fraumeni syndrome\tDisease
17\t57\t61\tTP53\tGene
"""
(doc,) = parse_pubtator(io.StringIO(pubtator))
print(repr(doc.text))
for span in doc.annotations:
    print(span.start, span.end, span.etype.value, doc.text[span.start:span.end])

# tokens carry the same offsets; IOBES labels are per entity type
tokens = document_tokens(doc)
labels = encode_iobes(tokens, doc.annotations, EntityType.Disease)
print([f"{t.text}/{l}" for t, l in zip(tokens, labels) if str(l) != "O"])
assert decode_iobes(labels, tokens, doc.text) == doc.spans_of(EntityType.Disease)

# CoNLL in, harmonized JSONL out
conll = "BRCA1\tB-Gene\nis\tO\nmutated\tO\n\nbreast\tB-Disease\ncancer\tI-Disease\n"
(cdoc,) = parse_conll(io.StringIO(conll), scheme="IOB2")
out = io.StringIO()
# every harmonized record names its split
write_jsonl([replace(cdoc, split=Split.Train)], out)
print(out.getvalue())
