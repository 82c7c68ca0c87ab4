"""Token/POS/phrase-span annotations and the built-in heuristic chunker.

The AnnotationSet JSONL schema (shared with the external annotation bridge):
{"doc_id": str, "tokens": [[surface, lemma, pos], ...],
 "sentences": [[start, end], ...], "np": [[s, e], ...], "vp": [[s, e], ...],
 "adj": [[s, e], ...], "coref": [[[s, e], ...], ...]}   (end exclusive)
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from importlib import resources

from .errors import DataError

_TOKEN_RE = re.compile(r"[A-Za-z0-9_'-]+|[.!?;:,]")
_SENT_END = {".", "!", "?"}

_IRREGULAR_LEMMAS = {
    "is": "be", "am": "be", "are": "be", "was": "be", "were": "be", "been": "be",
    "being": "be", "has": "have", "had": "have", "having": "have",
    "does": "do", "did": "do", "done": "do", "goes": "go", "went": "go",
    "gone": "go", "made": "make", "said": "say", "got": "get", "gotten": "get",
    "saw": "see", "seen": "see", "took": "take", "taken": "take",
    "came": "come", "knew": "know", "known": "know", "ran": "run",
    "sat": "sit", "wrote": "write", "written": "write",
    "men": "man", "women": "woman", "children": "child", "people": "person",
    "feet": "foot", "teeth": "tooth", "mice": "mouse",
}

_ADJ_SUFFIXES = ("ous", "ful", "ive", "able", "ible", "ical", "less", "ish")
_VERB_SUFFIXES = ("ing", "ed", "ise", "ize", "ate")


def _load_wordlist(name):
    text = resources.files("cmapgen.data").joinpath(name).read_text("utf-8")
    return [ln for ln in text.splitlines() if ln.strip()]


def load_stopwords() -> frozenset:
    return frozenset(_load_wordlist("stopwords.txt"))


def load_pos_lexicon() -> dict:
    lex = {}
    for line in _load_wordlist("pos_lexicon.txt"):
        word, pos = line.split()
        lex[word] = pos
    return lex


@dataclass
class AnnotationSet:
    doc_id: str
    tokens: list = field(default_factory=list)   # (surface, lemma, pos)
    sentences: list = field(default_factory=list)  # (start, end)
    noun_phrases: list = field(default_factory=list)
    verb_phrases: list = field(default_factory=list)
    adjectives: list = field(default_factory=list)
    coref_chains: list = field(default_factory=list)  # list of span lists

    def validate(self):
        n = len(self.tokens)
        for group in (self.sentences, self.noun_phrases, self.verb_phrases,
                      self.adjectives):
            for s, e in group:
                if not (0 <= s < e <= n):
                    raise DataError(f"span out of range in {self.doc_id}: ({s},{e})")
        for chain in self.coref_chains:
            if len(chain) < 2:
                raise DataError(f"coref chain of <2 spans in {self.doc_id}")
            for s, e in chain:
                if not (0 <= s < e <= n):
                    raise DataError(f"span out of range in {self.doc_id}: ({s},{e})")
        for label, group in (("np", self.noun_phrases), ("vp", self.verb_phrases),
                             ("adj", self.adjectives)):
            spans = sorted(group)
            for a, b in zip(spans, spans[1:]):
                if b[0] < a[1]:
                    raise DataError(
                        f"overlapping {label} spans in {self.doc_id}: {a} {b}")
        return self

    def to_json(self):
        return json.dumps({
            "doc_id": self.doc_id,
            "tokens": [list(t) for t in self.tokens],
            "sentences": [list(s) for s in self.sentences],
            "np": [list(s) for s in self.noun_phrases],
            "vp": [list(s) for s in self.verb_phrases],
            "adj": [list(s) for s in self.adjectives],
            "coref": [[list(sp) for sp in chain] for chain in self.coref_chains],
        })

    @classmethod
    def from_json(cls, text):
        try:
            d = json.loads(text)
            ann = cls(
                doc_id=d["doc_id"],
                tokens=[tuple(t) for t in d["tokens"]],
                sentences=[tuple(s) for s in d["sentences"]],
                noun_phrases=[tuple(s) for s in d["np"]],
                verb_phrases=[tuple(s) for s in d["vp"]],
                adjectives=[tuple(s) for s in d["adj"]],
                coref_chains=[[tuple(sp) for sp in ch] for ch in d["coref"]],
            )
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
            raise DataError(f"malformed annotation record: {e}") from e
        return ann.validate()


def lemmatize(word: str) -> str:
    w = word.lower()
    if w in _IRREGULAR_LEMMAS:
        return _IRREGULAR_LEMMAS[w]
    if len(w) > 4 and w.endswith("ies"):
        return w[:-3] + "y"
    if len(w) > 3 and w.endswith("es") and w[-3] in "sxz":
        return w[:-2]
    if len(w) > 3 and w.endswith("s") and not w.endswith("ss"):
        return w[:-1]
    return w


def _guess_pos(word: str, lexicon: dict) -> str:
    w = word.lower()
    if w in lexicon:
        return lexicon[w]
    if not any(c.isalpha() for c in w):
        return "NUM" if any(c.isdigit() for c in w) else "PUNCT"
    if w.endswith("ly") and len(w) > 4:
        return "ADV"
    if any(w.endswith(s) for s in _ADJ_SUFFIXES) and len(w) > 5:
        return "ADJ"
    # bare -ing/-ed forms lean verbal unless lemmatization keeps them nominal
    if any(w.endswith(s) for s in _VERB_SUFFIXES) and len(w) > 5 \
            and lemmatize(w) in lexicon and lexicon[lemmatize(w)] == "VERB":
        return "VERB"
    return "NOUN"


def chunk_heuristic(text: str, doc_id: str = "", lexicon: dict = None) -> AnnotationSet:
    """Regex tokenization plus lexicon/suffix POS guesses.

    Noun phrases are maximal (ADJ|NOUN)+ runs ending in a noun; verbs and
    adjectives outside NPs become single-token spans.  No coref chains.
    """
    if lexicon is None:
        lexicon = load_pos_lexicon()
    surfaces = _TOKEN_RE.findall(text)
    tokens = []
    for surf in surfaces:
        pos = "PUNCT" if surf in ".!?;:," else _guess_pos(surf, lexicon)
        tokens.append((surf, lemmatize(surf), pos))

    sentences = []
    start = 0
    for i, (surf, _, _) in enumerate(tokens):
        if surf in _SENT_END:
            if i + 1 > start:
                sentences.append((start, i + 1))
            start = i + 1
    if start < len(tokens):
        sentences.append((start, len(tokens)))

    noun_phrases = []
    i = 0
    n = len(tokens)
    while i < n:
        if tokens[i][2] in ("ADJ", "NOUN"):
            j = i
            while j < n and tokens[j][2] in ("ADJ", "NOUN"):
                j += 1
            # trim trailing adjectives so the run ends in a noun
            end = j
            while end > i and tokens[end - 1][2] != "NOUN":
                end -= 1
            if end > i:
                noun_phrases.append((i, end))
            i = j
        else:
            i += 1

    in_np = set()
    for s, e in noun_phrases:
        in_np.update(range(s, e))
    verb_phrases = [(i, i + 1) for i, t in enumerate(tokens)
                    if t[2] == "VERB" and i not in in_np]
    adjectives = [(i, i + 1) for i, t in enumerate(tokens)
                  if t[2] == "ADJ" and i not in in_np]

    return AnnotationSet(doc_id=doc_id, tokens=tokens, sentences=sentences,
                         noun_phrases=noun_phrases, verb_phrases=verb_phrases,
                         adjectives=adjectives).validate()


def load_annotations(path) -> dict:
    """Parse an AnnotationSet JSONL file into a doc_id -> AnnotationSet map."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                ann = AnnotationSet.from_json(line)
            except DataError as e:
                raise DataError(f"line {lineno}: {e}") from e
            if ann.doc_id in out:
                raise DataError(f"duplicate annotation for doc {ann.doc_id!r}")
            out[ann.doc_id] = ann
    return out


def save_annotations(annotations, path):
    with open(path, "w", encoding="utf-8") as fh:
        for ann in annotations:
            fh.write(ann.to_json() + "\n")
