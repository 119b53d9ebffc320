"""Seeded generator of annotated corpora with planted contextual cues.

Each sentence instantiates a template for a sampled subtype. With
probability ``cue_reliability`` the template carries that subtype's cue;
otherwise a neutral template is used. Subtypes listed together in one
template (``gsp.pers|gsp.org``) share its cue; ``cue_overlap`` is the
probability that such a shared template is drawn instead of a subtype's own.

Template file lines::

    subtype<TAB>template with {NE} and {CUE}<TAB>cue text
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from .corpus import Corpus, TagSchema, default_schema, parse_inline

NEUTRAL = "neutral"

# gsp subtype counts in an annotated broadcast-news sample: gsp.loc 1486, gsp.pers 7, gsp.org 385.
NEWS_COUNTS = {"gsp.loc": 1486, "gsp.pers": 7, "gsp.org": 385}
NEWS_DISTRIBUTION = {k: v / sum(NEWS_COUNTS.values()) for k, v in NEWS_COUNTS.items()}

DEFAULT_NAMES = ("France", "Allemagne", "Italie", "Espagne", "Irlande", "Maroc", "Belgique",
                 "Suisse", "Amérique", "Chine", "Russie", "Japon", "Angleterre", "Portugal",
                 "Grèce", "Algérie", "Tunisie", "Sénégal", "Canada", "Brésil")


class BadTemplate(ValueError):
    pass


@dataclass(frozen=True)
class GeneratorSpec:
    seed: int = 0
    n_sentences: int = 1000
    subtype_distribution: Mapping[str, float] = field(default_factory=lambda: dict(NEWS_DISTRIBUTION))
    cue_reliability: float = 0.9
    cue_overlap: float = 0.7
    sentences_per_doc: int = 10
    names: tuple[str, ...] = DEFAULT_NAMES

    def __post_init__(self):
        total = sum(self.subtype_distribution.values())
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"subtype distribution sums to {total}, not 1")
        if any(p < 0 for p in self.subtype_distribution.values()):
            raise ValueError("negative subtype probability")
        for name in ("cue_reliability", "cue_overlap"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.n_sentences < 0 or self.sentences_per_doc < 1:
            raise ValueError("bad corpus size")


@dataclass(frozen=True)
class Template:
    subtypes: tuple[str, ...]
    text: str
    cue: str | None

    @property
    def shared(self) -> bool:
        return len(self.subtypes) > 1


def parse_templates(text: str) -> list[Template]:
    out = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.startswith("#"):
            continue
        cols = line.split("\t")
        if len(cols) != 3:
            raise BadTemplate(f"line {lineno}: expected 3 tab-separated columns")
        subtypes, body, cue = (c.strip() for c in cols)
        cue = None if cue == "-" else cue
        if body.count("{NE}") != 1:
            raise BadTemplate(f"line {lineno}: template needs exactly one {{NE}}")
        if subtypes == NEUTRAL:
            if "{CUE}" in body or cue is not None:
                raise BadTemplate(f"line {lineno}: neutral templates carry no cue")
        elif cue is None or body.count("{CUE}") != 1:
            raise BadTemplate(f"line {lineno}: template needs one {{CUE}} and a cue text")
        out.append(Template(tuple(subtypes.split("|")), body, cue))
    if not out:
        raise BadTemplate("no templates")
    return out


def load_templates(path=None) -> list[Template]:
    if path is None:
        from .resources import data_path

        path = data_path("templates.tsv")
    return parse_templates(Path(path).read_text(encoding="utf-8"))


def _capitalize(sentence: str) -> str:
    """Upper-case the first letter outside tags."""
    m = re.search(r"(?:^|\s)([^\W\d_])", re.sub(r"<[^<>]*>", lambda t: " " * len(t.group()), sentence))
    if m is None:
        return sentence
    i = m.start(1)
    return sentence[:i] + sentence[i].upper() + sentence[i + 1:]


def generate(spec: GeneratorSpec, templates: Sequence[Template] | str | Path | None = None,
             schema: TagSchema | None = None) -> Corpus:
    """Generate a corpus; identical specs give identical corpora."""
    schema = schema or default_schema()
    if templates is None or isinstance(templates, (str, Path)):
        templates = load_templates(templates)
    neutral = [t for t in templates if t.subtypes == (NEUTRAL,)]
    labels = sorted(spec.subtype_distribution)
    own = {lab: [t for t in templates if t.subtypes == (lab,)] for lab in labels}
    shared = {lab: [t for t in templates if t.shared and lab in t.subtypes] for lab in labels}
    for lab in labels:
        main, _, sub = lab.partition(".")
        if not schema.is_valid_label(main, sub or None):
            raise BadTemplate(f"label {lab!r} is not in the schema")
        if spec.subtype_distribution[lab] > 0 and not (own[lab] or shared[lab] or neutral):
            raise BadTemplate(f"no template can realise {lab!r}")
    if spec.cue_reliability < 1 and not neutral:
        raise BadTemplate("cue_reliability < 1 requires neutral templates")

    rng = random.Random(spec.seed)
    weights = [spec.subtype_distribution[lab] for lab in labels]
    sentences = []
    for _ in range(spec.n_sentences):
        lab = rng.choices(labels, weights)[0]
        pool = neutral
        if rng.random() < spec.cue_reliability:
            use_shared = rng.random() < spec.cue_overlap
            pool = (shared[lab] if use_shared else own[lab]) or own[lab] or shared[lab] or neutral
        tpl = rng.choice(pool)
        name = rng.choice(spec.names)
        text = tpl.text.replace("{CUE}", tpl.cue or "")
        text = text.replace("{NE}", f"<{lab}> {name} </{lab}>")
        sentences.append(_capitalize(" ".join(text.split())))

    docs = []
    per = spec.sentences_per_doc
    for d, start in enumerate(range(0, len(sentences), per)):
        raw = "\n".join(sentences[start:start + per])
        docs.append(parse_inline(raw, schema, f"synth{spec.seed}-{d:05d}"))
    return Corpus(tuple(docs), schema)


def parse_spec(text: str) -> GeneratorSpec:
    """Read ``key = value`` lines into a :class:`GeneratorSpec`.

    ``distribution`` takes ``label:weight`` pairs separated by commas; the
    weights are normalised. ``templates`` is returned separately by
    :func:`load_spec`.
    """
    values = {}
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"cannot parse {line!r}")
        values[key.strip()] = value.strip()
    kwargs = {}
    for key, conv in (("seed", int), ("n_sentences", int), ("sentences_per_doc", int),
                      ("cue_reliability", float), ("cue_overlap", float)):
        if key in values:
            kwargs[key] = conv(values.pop(key))
    if "distribution" in values:
        weights = {}
        for item in values.pop("distribution").split(","):
            lab, _, w = item.strip().partition(":")
            weights[lab.strip()] = float(w)
        total = sum(weights.values())
        kwargs["subtype_distribution"] = {k: v / total for k, v in weights.items()}
    if "names" in values:
        kwargs["names"] = tuple(n.strip() for n in values.pop("names").split(",") if n.strip())
    values.pop("templates", None)
    if values:
        raise ValueError(f"unknown generator keys: {', '.join(sorted(values))}")
    return GeneratorSpec(**kwargs)


def load_spec(path) -> tuple[GeneratorSpec, Path | None]:
    """Spec plus the template path it names (relative to the spec file)."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    tpl = None
    for line in text.splitlines():
        key, sep, value = line.split("#", 1)[0].partition("=")
        if sep and key.strip() == "templates":
            tpl = (path.parent / value.strip()).resolve()
    return parse_spec(text), tpl
