"""Request annotation: tokens, POS tags, data anchors, and modality hints.

The annotator is deliberately lightweight: Unicode word segmentation, a
lexicon + suffix-rule tagger, greedy longest-match-first anchor detection
over n-grams (n <= 4) against the dataset lexicon, literal parsers for
years / relative temporal phrases / numbers, and a trigger lexicon for
explicit output-modality requests. The first non-stopword verb or noun of
each content span is marked as its head.
"""

from __future__ import annotations

import datetime
import json
import re
from dataclasses import dataclass, field
from pathlib import Path

from .dataset import Dataset, is_year, parse_number
from .embeddings import EmbeddingStore
from .errors import AnnotationError

_DATA_DIR = Path(__file__).parent / "data"

_TOKEN_RE = re.compile(r"\d+(?:,\d{3})*(?:\.\d+)?|\w+(?:'\w+)?|[^\w\s]", re.UNICODE)

_WORD_NUMBERS = {
    "one": 1, "two": 2, "three": 3, "four": 4, "five": 5, "six": 6, "seven": 7,
    "eight": 8, "nine": 9, "ten": 10, "eleven": 11, "twelve": 12, "thirteen": 13,
    "fourteen": 14, "fifteen": 15, "sixteen": 16, "seventeen": 17, "eighteen": 18,
    "nineteen": 19, "twenty": 20,
}

_VERB_SUFFIXES = ("ize", "ise", "ify", "ate")
_NOUN_SUFFIXES = ("tion", "sion", "ment", "ness", "ity", "ance", "ence", "ship", "ism")
_ADJ_SUFFIXES = ("ful", "ous", "ive", "less", "able", "ible", "ish", "est")


@dataclass(frozen=True)
class Token:
    surface: str
    lemma: str
    tag: str  # noun | verb | adjective | number | stopword | symbol | other
    start: int
    end: int

    @property
    def span(self) -> tuple[int, int]:
        return (self.start, self.end)


@dataclass(frozen=True)
class Anchor:
    """A detected data reference: token range [first, last] inclusive.

    kind: column   -> column set, value None
          value    -> (column, value) cell binding
          temporal -> year literal on the temporal column (column may be None
                      when the dataset has no temporal column)
          numeric  -> bare number literal, number set
          table    -> reference to the dataset itself
    """

    kind: str
    first: int
    last: int
    start: int
    end: int
    column: str | None = None
    value: str | None = None
    year: int | None = None
    number: float | None = None
    relative_future: bool = False
    future_offset: int = 0  # years past the reference year, when future

    @property
    def token_range(self) -> range:
        return range(self.first, self.last + 1)


@dataclass(frozen=True)
class ModalityHint:
    viz_type: str
    first: int
    last: int
    trigger: str


@dataclass
class ContentSpan:
    token_indices: list[int]
    lemmas: list[str]
    head_index: int | None = None


@dataclass
class PhraseStructure:
    text: str
    tokens: list[Token]
    anchors: list[Anchor]
    modality_hint: ModalityHint | None
    content_spans: list[ContentSpan]

    def anchor_token_indices(self) -> set[int]:
        out: set[int] = set()
        for a in self.anchors:
            out.update(a.token_range)
        return out

    def content_token_indices(self) -> list[int]:
        return [i for span in self.content_spans for i in span.token_indices]

    @property
    def meaningful_count(self) -> int:
        """Tokens that selection coverage is measured over."""
        return len(self.content_token_indices()) + len(self.anchor_token_indices())


@dataclass
class AnnotatorConfig:
    reference_year: int = 0  # 0 -> current system year
    tau_data: float = 0.60
    stopwords: frozenset[str] = frozenset()
    pos_lexicon: dict[str, str] = field(default_factory=dict)
    triggers: dict[str, str] = field(default_factory=dict)
    embeddings: EmbeddingStore | None = None

    def __post_init__(self):
        if self.reference_year == 0:
            self.reference_year = datetime.date.today().year
        if not self.stopwords:
            self.stopwords = load_stopwords()
        if not self.pos_lexicon:
            self.pos_lexicon = load_pos_lexicon()
        if not self.triggers:
            self.triggers = load_triggers()


def load_stopwords(path: str | Path | None = None) -> frozenset[str]:
    p = Path(path or _DATA_DIR / "stopwords.txt")
    return frozenset(w.strip().lower() for w in p.read_text().split() if w.strip())


def load_pos_lexicon(path: str | Path | None = None) -> dict[str, str]:
    raw = json.loads(Path(path or _DATA_DIR / "pos_lexicon.json").read_text())
    lexicon: dict[str, str] = {}
    for tag, words in raw.items():
        for w in words:
            lexicon.setdefault(w.lower(), tag)
    return lexicon


def load_triggers(path: str | Path | None = None) -> dict[str, str]:
    raw = json.loads(Path(path or _DATA_DIR / "triggers.json").read_text())
    return {phrase.lower(): viz for phrase, viz in raw.items()}


def _lemma(surface: str) -> str:
    lemma = surface.lower()
    if lemma.endswith("'s"):
        lemma = lemma[:-2]
    return lemma


def _singular(lemma: str) -> str | None:
    if lemma.endswith("ies") and len(lemma) > 4:
        return lemma[:-3] + "y"
    if lemma.endswith("es") and len(lemma) > 4:
        return lemma[:-2]
    if lemma.endswith("s") and not lemma.endswith("ss") and len(lemma) > 3:
        return lemma[:-1]
    return None


def _tag(lemma: str, surface: str, stopwords: frozenset[str], lexicon: dict[str, str]) -> str:
    if lemma in stopwords:
        return "stopword"
    if re.fullmatch(r"\d+(?:,\d{3})*(?:\.\d+)?", surface):
        return "number"
    if not any(c.isalnum() for c in surface):
        return "symbol"
    if lemma in lexicon:
        return lexicon[lemma]
    singular = _singular(lemma)
    if singular and singular in lexicon:
        return lexicon[singular]
    if len(lemma) > 4 and (lemma.endswith("ing") or lemma.endswith("ed")):
        return "verb"
    if lemma.endswith(_VERB_SUFFIXES):
        return "verb"
    if lemma.endswith(_NOUN_SUFFIXES):
        return "noun"
    if lemma.endswith(_ADJ_SUFFIXES):
        return "adjective"
    return "noun"


def tokenize(text: str, config: AnnotatorConfig) -> list[Token]:
    tokens = []
    for m in _TOKEN_RE.finditer(text):
        surface = m.group(0)
        lemma = _lemma(surface)
        tag = _tag(lemma, surface, config.stopwords, config.pos_lexicon)
        tokens.append(Token(surface, lemma, tag, m.start(), m.end()))
    return tokens


def _ngram_lemmas(tokens: list[Token], i: int, n: int) -> str | None:
    if i + n > len(tokens):
        return None
    window = tokens[i : i + n]
    if any(t.tag == "symbol" for t in window):
        return None
    return " ".join(t.lemma for t in window)


def _relative_year(tokens: list[Token], i: int, reference_year: int):
    """Match a relative temporal phrase starting at token i.

    Returns (year, length, future) or None. Patterns: 'last/this/next year',
    '<n> years ago', 'in <n> years', 'next <n> years', '<n> years from now'.
    """
    lemmas = ["year" if t.lemma == "years" else t.lemma for t in tokens[i : i + 5]]

    def num_at(j):
        if j >= len(lemmas):
            return None
        if lemmas[j] in _WORD_NUMBERS:
            return _WORD_NUMBERS[lemmas[j]]
        n = parse_number(lemmas[j])
        if n is not None and float(n).is_integer() and not is_year(lemmas[j]):
            return int(n)
        return None

    if len(lemmas) >= 2 and lemmas[1] == "year":
        if lemmas[0] == "last":
            return reference_year - 1, 2, False
        if lemmas[0] in ("this", "current"):
            return reference_year, 2, False
        if lemmas[0] in ("next", "coming", "following", "upcoming"):
            return reference_year + 1, 2, True
    n = num_at(0)
    if n is not None and len(lemmas) >= 3 and lemmas[1] == "year":
        if lemmas[2] == "ago":
            return reference_year - n, 3, False
        if len(lemmas) >= 4 and lemmas[2] == "from" and lemmas[3] == "now":
            return reference_year + n, 4, True
    if lemmas[0] in ("next", "coming") and (m := num_at(1)) is not None:
        if len(lemmas) >= 3 and lemmas[2] == "year":
            return reference_year + m, 3, True
    if lemmas[0] == "in" and (m := num_at(1)) is not None:
        if len(lemmas) >= 3 and lemmas[2] == "year":
            return reference_year + m, 3, True
    return None


def _find_anchors(
    tokens: list[Token], dataset: Dataset, config: AnnotatorConfig
) -> list[Anchor]:
    anchors: list[Anchor] = []
    consumed = [False] * len(tokens)
    temporal_cols = dataset.columns_of_type("temporal")
    temporal_col = temporal_cols[0].name if temporal_cols else None
    table_aliases = set(dataset.table_aliases)

    def claim(first: int, last: int, **kw) -> None:
        anchors.append(
            Anchor(
                first=first,
                last=last,
                start=tokens[first].start,
                end=tokens[last].end,
                **kw,
            )
        )
        for j in range(first, last + 1):
            consumed[j] = True

    # pass 1: relative temporal phrases (most specific multi-token literals)
    i = 0
    while i < len(tokens):
        if not consumed[i]:
            hit = _relative_year(tokens, i, config.reference_year)
            if hit is not None:
                year, length, future = hit
                claim(i, i + length - 1, kind="temporal", column=temporal_col,
                      year=year, relative_future=future,
                      future_offset=max(0, year - config.reference_year))
                i += length
                continue
        i += 1

    # pass 2: greedy longest-match-first lexicon scan (n-grams, n <= 4)
    for n in range(4, 0, -1):
        i = 0
        while i + n <= len(tokens):
            if any(consumed[j] for j in range(i, i + n)):
                i += 1
                continue
            gram = _ngram_lemmas(tokens, i, n)
            if gram is None:
                i += 1
                continue
            if gram in table_aliases:
                claim(i, i + n - 1, kind="table")
                i += n
                continue
            column = dataset.resolve_column(gram)
            if column is not None:
                claim(i, i + n - 1, kind="column", column=column)
                i += n
                continue
            binding = dataset.resolve_alias(gram)
            if binding is not None:
                claim(i, i + n - 1, kind="value", column=binding[0], value=binding[1])
                i += n
                continue
            i += 1

    # pass 3: single-token literals (years, then bare numbers)
    for i, tok in enumerate(tokens):
        if consumed[i]:
            continue
        if tok.tag != "number":
            if tok.lemma in _WORD_NUMBERS:
                claim(i, i, kind="numeric", number=float(_WORD_NUMBERS[tok.lemma]))
            continue
        if is_year(tok.surface):
            year = int(tok.surface)
            claim(i, i, kind="temporal", column=temporal_col, year=year,
                  relative_future=year > config.reference_year,
                  future_offset=max(0, year - config.reference_year))
        else:
            num = parse_number(tok.surface)
            if num is not None:
                claim(i, i, kind="numeric", number=num)

    # pass 4: embedding fallback for unmatched single nouns (step-(ii)
    # word-embedding route, gated by tau_data)
    if config.embeddings is not None:
        column_aliases = dataset.column_lexicon
        for i, tok in enumerate(tokens):
            if consumed[i] or tok.tag not in ("noun", "adjective", "verb"):
                continue
            if tok.lemma not in config.embeddings:
                continue
            best: tuple[float, str] | None = None
            for alias, column in column_aliases.items():
                if " " in alias:
                    continue
                cos = config.embeddings.cosine(tok.lemma, alias)
                if cos is None or cos < config.tau_data:
                    continue
                if best is None or cos > best[0]:
                    best = (cos, column)
            if best is not None:
                claim(i, i, kind="column", column=best[1])

    return sorted(anchors, key=lambda a: a.first)


def _find_modality(tokens: list[Token], triggers: dict[str, str]) -> ModalityHint | None:
    """Longest matching trigger phrase anywhere in the token stream."""
    best: ModalityHint | None = None
    best_len = 0
    for n in range(4, 0, -1):
        for i in range(len(tokens) - n + 1):
            gram = _ngram_lemmas(tokens, i, n)
            if gram is None:
                continue
            viz = triggers.get(gram)
            if viz is not None and n > best_len:
                best = ModalityHint(viz, i, i + n - 1, gram)
                best_len = n
    return best


def annotate(text: str, dataset: Dataset, config: AnnotatorConfig | None = None) -> PhraseStructure:
    """Produce the semantic phrase structure for one request."""
    if config is None:
        config = AnnotatorConfig()
    if not text or not text.strip():
        raise AnnotationError("empty request text")
    tokens = tokenize(text, config)
    if not tokens:
        raise AnnotationError("request contains no tokens")
    anchors = _find_anchors(tokens, dataset, config)
    modality = _find_modality(tokens, config.triggers)

    excluded = set()
    for a in anchors:
        excluded.update(a.token_range)
    if modality is not None:
        excluded.update(range(modality.first, modality.last + 1))

    spans: list[ContentSpan] = []
    current: list[int] = []
    for i, tok in enumerate(tokens):
        usable = (
            i not in excluded
            and tok.tag not in ("stopword", "symbol", "number")
        )
        if usable:
            current.append(i)
        elif current:
            spans.append(ContentSpan(current, [tokens[j].lemma for j in current]))
            current = []
    if current:
        spans.append(ContentSpan(current, [tokens[j].lemma for j in current]))

    for span in spans:
        for idx in span.token_indices:
            if tokens[idx].tag in ("verb", "noun"):
                span.head_index = idx
                break

    return PhraseStructure(
        text=text,
        tokens=tokens,
        anchors=anchors,
        modality_hint=modality,
        content_spans=spans,
    )


def extract_modality(phrase: PhraseStructure) -> str | None:
    """The visualization type explicitly requested in the phrase, if any."""
    return phrase.modality_hint.viz_type if phrase.modality_hint else None
