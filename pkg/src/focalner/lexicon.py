"""Lexical resources: morphological dictionary, gazetteer, semantic
clusters and verb frames, all loaded from tab-separated files.

File layouts (``#`` lines are comments, ``-`` marks an empty field)::

    morph      form  lemma  pos  gender  number
    gazetteer  phrase  category  trigger_role  [granularity]
    clusters   cluster_id  label  lemma
    verbs      lemma  subject_restriction  verb_class
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from types import MappingProxyType
from typing import Mapping, Sequence

from .corpus import Sentence

POS_LABELS = ("NOUN", "VERB", "ADJ", "DET", "PREP", "PRON", "ADV", "PUNC", "PROPN", "UNK")
TRIGGER_ROLES = ("title", "loc_prep", "org_keyword", "none")
GRANULARITY_RANK = {"town": 0, "region": 1, "country": 2}


class LexiconError(Exception):
    pass


class FileMissing(LexiconError):
    pass


class MalformedRow(LexiconError):
    def __init__(self, path, line: int, message: str):
        super().__init__(f"{path}:{line}: {message}")
        self.line = line


@dataclass(frozen=True, order=True)
class MorphEntry:
    form: str
    lemma: str
    pos: str
    gender: str | None = None
    number: str | None = None


@dataclass(frozen=True)
class GazetteerEntry:
    phrase: tuple[str, ...]
    category: str
    trigger_role: str = "none"
    granularity: str | None = None

    @property
    def is_trigger(self) -> bool:
        return self.trigger_role != "none"


@dataclass(frozen=True)
class SemCluster:
    cluster_id: str
    label: str
    members: frozenset[str]


@dataclass(frozen=True)
class VerbFrame:
    lemma: str
    subject_restriction: str
    verb_class: str | None = None


@dataclass(frozen=True)
class GazetteerMatch:
    first: int
    last: int
    entry: GazetteerEntry

    @property
    def category(self) -> str:
        return self.entry.category

    @property
    def trigger_role(self) -> str:
        return self.entry.trigger_role


class _Trie:
    """Token-level phrase trie. Read-only once built."""

    __slots__ = ("children", "entry")

    def __init__(self):
        self.children: dict[str, _Trie] = {}
        self.entry: GazetteerEntry | None = None

    def insert(self, entry: GazetteerEntry) -> None:
        node = self
        for tok in entry.phrase:
            node = node.children.setdefault(tok, _Trie())
        if node.entry is None:  # first row wins for duplicate phrases
            node.entry = entry

    def step(self, surface: str) -> _Trie | None:
        child = self.children.get(surface)
        if child is None:
            child = self.children.get(surface.lower())
        return child


@dataclass(frozen=True)
class LexiconSet:
    morph: Mapping[str, frozenset[MorphEntry]]
    gazetteer: tuple[GazetteerEntry, ...]
    clusters: Mapping[str, frozenset[str]]
    cluster_labels: Mapping[str, str]
    verbs: Mapping[str, VerbFrame]

    def __post_init__(self):
        trie = _Trie()
        for entry in self.gazetteer:
            trie.insert(entry)
        object.__setattr__(self, "_trie", trie)
        by_phrase = {}
        for entry in self.gazetteer:
            by_phrase.setdefault(tuple(t.lower() for t in entry.phrase), entry)
        object.__setattr__(self, "_by_phrase", MappingProxyType(by_phrase))

    def gazetteer_entry(self, phrase: Sequence[str]) -> GazetteerEntry | None:
        return self._by_phrase.get(tuple(t.lower() for t in phrase))

    def cluster_label(self, cluster_id: str) -> str:
        return self.cluster_labels[cluster_id]


# -- loading --------------------------------------------------------------

def _rows(path, widths: tuple[int, ...]):
    path = Path(path)
    if not path.is_file():
        raise FileMissing(f"lexicon file not found: {path}")
    seen = set()
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n").rstrip("\r")
            if not line.strip() or line.startswith("#"):
                continue
            cols = line.split("\t")
            if len(cols) not in widths:
                want = " or ".join(map(str, widths))
                raise MalformedRow(path, lineno, f"expected {want} columns, got {len(cols)}")
            cols = tuple(c.strip() for c in cols)
            if any(not c for c in cols):
                raise MalformedRow(path, lineno, "empty field")
            if cols in seen:
                continue
            seen.add(cols)
            yield lineno, cols


def _opt(value: str) -> str | None:
    return None if value == "-" else value


def load_morph(path) -> dict[str, frozenset[MorphEntry]]:
    table: dict[str, set[MorphEntry]] = {}
    for lineno, (form, lemma, pos, gender, number) in _rows(path, (5,)):
        if pos not in POS_LABELS:
            raise MalformedRow(path, lineno, f"unknown POS {pos!r}")
        entry = MorphEntry(form, lemma, pos, _opt(gender), _opt(number))
        table.setdefault(form, set()).add(entry)
    return {k: frozenset(v) for k, v in table.items()}


def load_gazetteer(path) -> tuple[GazetteerEntry, ...]:
    entries = []
    for lineno, cols in _rows(path, (3, 4)):
        role = _opt(cols[2]) or "none"
        if role not in TRIGGER_ROLES:
            raise MalformedRow(path, lineno, f"unknown trigger role {role!r}")
        gran = _opt(cols[3]) if len(cols) == 4 else None
        if gran is not None and gran not in GRANULARITY_RANK:
            raise MalformedRow(path, lineno, f"unknown granularity {gran!r}")
        entries.append(GazetteerEntry(tuple(cols[0].split()), cols[1], role, gran))
    return tuple(entries)


def load_clusters(path) -> tuple[dict[str, frozenset[str]], dict[str, str]]:
    by_lemma: dict[str, set[str]] = {}
    labels: dict[str, str] = {}
    for lineno, (cid, label, lemma) in _rows(path, (3,)):
        if labels.setdefault(cid, label) != label:
            raise MalformedRow(path, lineno, f"cluster {cid!r} relabelled")
        by_lemma.setdefault(lemma, set()).add(cid)
    return {k: frozenset(v) for k, v in by_lemma.items()}, labels


def load_verbs(path) -> dict[str, VerbFrame]:
    frames = {}
    for lineno, (lemma, restriction, vclass) in _rows(path, (3,)):
        if restriction not in ("human", "any"):
            raise MalformedRow(path, lineno, f"bad subject restriction {restriction!r}")
        if lemma in frames:
            raise MalformedRow(path, lineno, f"second frame for {lemma!r}")
        frames[lemma] = VerbFrame(lemma, restriction, _opt(vclass))
    return frames


def load_lexicons(morph_path, gazetteer_path, cluster_path, verb_path) -> LexiconSet:
    clusters, labels = load_clusters(cluster_path)
    return LexiconSet(
        morph=MappingProxyType(load_morph(morph_path)),
        gazetteer=load_gazetteer(gazetteer_path),
        clusters=MappingProxyType(clusters),
        cluster_labels=MappingProxyType(labels),
        verbs=MappingProxyType(load_verbs(verb_path)),
    )


def default_lexicons() -> LexiconSet:
    """The small French lexicons shipped with the package."""
    from .resources import data_path

    return load_lexicons(data_path("morph.tsv"), data_path("gazetteer.tsv"),
                         data_path("clusters.tsv"), data_path("verbs.tsv"))


# -- lookups --------------------------------------------------------------

def lookup_morph(lex: LexiconSet, form: str) -> frozenset[MorphEntry]:
    """All analyses of ``form``; no disambiguation is attempted."""
    found = lex.morph.get(form)
    if found is None:
        found = lex.morph.get(form.lower())
    if found is not None:
        return found
    pos = "PROPN" if form[:1].isupper() else "UNK"
    return frozenset({MorphEntry(form, form.lower(), pos)})


def match_gazetteer(lex: LexiconSet, sentence: Sentence | Sequence[str]) -> list[GazetteerMatch]:
    """Leftmost-longest, non-overlapping phrase matches."""
    surfaces = sentence.surfaces if isinstance(sentence, Sentence) else list(sentence)
    out = []
    i, n = 0, len(surfaces)
    while i < n:
        node, best = lex._trie, None
        j = i
        while j < n:
            node = node.step(surfaces[j])
            if node is None:
                break
            if node.entry is not None:
                best = (j, node.entry)
            j += 1
        if best is None:
            i += 1
        else:
            out.append(GazetteerMatch(i, best[0], best[1]))
            i = best[0] + 1
    return out


def lookup_cluster(lex: LexiconSet, lemma: str) -> frozenset[str]:
    return lex.clusters.get(lemma, frozenset())


def lookup_verb_frame(lex: LexiconSet, lemma: str) -> VerbFrame | None:
    return lex.verbs.get(lemma)
