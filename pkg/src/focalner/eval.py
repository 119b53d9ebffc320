"""Slot alignment, precision/recall/F, slot error rate and reports."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .corpus import AnnotatedSpan, Corpus, Document, TagSchema


class TokenMismatch(ValueError):
    pass


class EmptyReference(ZeroDivisionError):
    pass


class UnknownLabel(ValueError):
    pass


CORRECT, SUBSTITUTION, DELETION, INSERTION = "correct", "type_substitution", "deletion", "insertion"


@dataclass(frozen=True)
class SlotMatch:
    ref: AnnotatedSpan | None
    hyp: AnnotatedSpan | None
    status: str
    sentence_index: int = 0
    doc_id: str = ""


@dataclass(frozen=True)
class PRF:
    precision: float
    recall: float
    f_measure: float
    ref_count: int
    hyp_count: int = 0
    defined: bool = True


def f_measure(p: float, r: float) -> float:
    return 2 * p * r / (p + r) if p + r > 0 else 0.0


def align_slots(ref: Document, hyp: Document) -> list[SlotMatch]:
    """Pair slots by exact boundaries.

    A main-type mismatch on identical boundaries counts as one deletion
    plus one insertion.
    """
    if [s.surfaces for s in ref.sentences] != [s.surfaces for s in hyp.sentences]:
        raise TokenMismatch(f"token sequences differ for document {ref.doc_id!r}")
    out = []
    for si, (rs, hs) in enumerate(zip(ref.sentences, hyp.sentences)):
        hyp_at = {(s.first_token, s.last_token): s for s in hs.spans}
        used = set()
        for r in rs.spans:
            key = (r.first_token, r.last_token)
            h = hyp_at.get(key)
            if h is not None and h.main_type == r.main_type:
                used.add(key)
                status = CORRECT if h.sub_type == r.sub_type else SUBSTITUTION
                out.append(SlotMatch(r, h, status, si, ref.doc_id))
            else:
                out.append(SlotMatch(r, None, DELETION, si, ref.doc_id))
        for key, h in sorted(hyp_at.items()):
            if key not in used:
                out.append(SlotMatch(None, h, INSERTION, si, ref.doc_id))
    return out


def slot_error_rate(matches: Sequence[SlotMatch]) -> float:
    counts = Counter(m.status for m in matches)
    n_ref = sum(1 for m in matches if m.ref is not None)
    if n_ref == 0:
        raise EmptyReference("slot error rate needs at least one reference slot")
    return (counts[DELETION] + counts[INSERTION] + counts[SUBSTITUTION]) / n_ref


def score_prf(matches: Sequence[SlotMatch], label: str) -> PRF:
    n_ref = sum(1 for m in matches if m.ref is not None and m.ref.label == label)
    n_hyp = sum(1 for m in matches if m.hyp is not None and m.hyp.label == label)
    correct = sum(1 for m in matches if m.status == CORRECT and m.ref.label == label)
    p = correct / n_hyp if n_hyp else 0.0
    r = correct / n_ref if n_ref else 0.0
    return PRF(p, r, f_measure(p, r), n_ref, n_hyp, defined=bool(n_ref and n_hyp))


# -- merging --------------------------------------------------------------

def parse_merge(text: str) -> dict[str, str]:
    """``gsp.hum`` (pers and org merged) or ``gsp.hum=gsp.pers,gsp.org``."""
    target, sep, sources = text.partition("=")
    if sep:
        parts = [s.strip() for s in sources.split(",") if s.strip()]
    else:
        main = target.split(".")[0]
        parts = [f"{main}.pers", f"{main}.org"]
    return {s: target.strip() for s in parts}


def _split(label: str) -> tuple[str, str | None]:
    main, _, sub = label.partition(".")
    return main, sub or None


def _check_merge(merge: Mapping[str, str], schema: TagSchema | None) -> None:
    for label in list(merge) + list(merge.values()):
        main, sub = _split(label)
        if sub is None:
            raise UnknownLabel(f"merge labels must be main.sub, got {label!r}")
        if schema is not None and not schema.is_valid_label(main, sub):
            raise UnknownLabel(f"{label!r} is not declared in the schema")
    for src, dst in merge.items():
        if _split(src)[0] != _split(dst)[0]:
            raise UnknownLabel(f"cannot merge {src!r} into a different main type")


def _merge_doc(doc: Document, merge: Mapping[str, str]) -> Document:
    def rewrite(span):
        if span.label in merge:
            return AnnotatedSpan(span.first_token, span.last_token, span.main_type,
                                 _split(merge[span.label])[1])
        return span

    return doc.replace_spans([[rewrite(s) for s in sent.spans] for sent in doc.sentences])


def merge_subtypes(obj: Document | Corpus, merge: Mapping[str, str],
                   schema: TagSchema | None = None) -> Document | Corpus:
    """Rewrite subtype labels (e.g. pers and org into hum). Idempotent."""
    if isinstance(obj, Corpus):
        _check_merge(merge, obj.schema)
        return Corpus(tuple(_merge_doc(d, merge) for d in obj.documents), obj.schema)
    _check_merge(merge, schema)
    return _merge_doc(obj, merge)


# -- reports --------------------------------------------------------------

def project_gold_spans(ref: Document, hyp: Document, schema: TagSchema) -> Document:
    """Reference boundaries and main types with the hypothesis's subtypes.

    Reference slots the hypothesis missed get the schema default subtype.
    """
    out = []
    for rs, hs in zip(ref.sentences, hyp.sentences):
        hyp_at = {(s.first_token, s.last_token, s.main_type): s for s in hs.spans}
        spans = []
        for r in rs.spans:
            h = hyp_at.get((r.first_token, r.last_token, r.main_type))
            if h is not None:
                sub = h.sub_type
            else:
                sub = schema.default_subtype.get(r.main_type) if r.sub_type is not None else None
            spans.append(AnnotatedSpan(r.first_token, r.last_token, r.main_type, sub))
        out.append(spans)
    return ref.replace_spans(out)


@dataclass
class ScoreReport:
    rows: list[tuple[str, PRF]]
    ser: float
    confusion: Counter = field(default_factory=Counter)
    baseline_rows: list[tuple[str, PRF]] = field(default_factory=list)
    baseline_ser: float | None = None

    def row(self, label: str, baseline: bool = False) -> PRF:
        for name, prf in (self.baseline_rows if baseline else self.rows):
            if name == label:
                return prf
        raise KeyError(label)

    @property
    def labels(self) -> list[str]:
        return [name for name, _ in self.rows]

    def to_text(self) -> str:
        width = max([len(n) for n, _ in self.rows + self.baseline_rows] + [8])
        head = f"{'label':<{width}}  {'#ref':>6}  {'P':>6}  {'R':>6}  {'F':>6}"
        lines = [head]

        def fmt(rows):
            for name, s in rows:
                lines.append(f"{name:<{width}}  {s.ref_count:>6}  {s.precision:>6.4f}  "
                             f"{s.recall:>6.4f}  {s.f_measure:>6.4f}")

        fmt(self.rows)
        if self.baseline_rows:
            lines.append("baseline")
            fmt(self.baseline_rows)
        lines.append(f"SER {self.ser:.4f}")
        if self.baseline_ser is not None:
            lines.append(f"baseline SER {self.baseline_ser:.4f}")
        return "\n".join(lines) + "\n"

    def to_tsv(self) -> str:
        lines = ["system\tlabel\tref\tprecision\trecall\tf_measure"]
        for system, rows in (("system", self.rows), ("baseline", self.baseline_rows)):
            for name, s in rows:
                lines.append(f"{system}\t{name}\t{s.ref_count}\t{s.precision:.4f}\t"
                             f"{s.recall:.4f}\t{s.f_measure:.4f}")
        lines.append(f"system\tSER\t\t{self.ser:.4f}\t\t")
        if self.baseline_ser is not None:
            lines.append(f"baseline\tSER\t\t{self.baseline_ser:.4f}\t\t")
        return "\n".join(lines) + "\n"


def _pair_docs(ref: Corpus, hyp: Corpus) -> list[tuple[Document, Document]]:
    by_id = {d.doc_id: d for d in hyp.documents}
    pairs = []
    for d in ref.documents:
        if d.doc_id not in by_id:
            raise TokenMismatch(f"document {d.doc_id!r} missing from hypothesis")
        pairs.append((d, by_id[d.doc_id]))
    return pairs


def _matches(ref: Corpus, hyp: Corpus, gold_spans: bool) -> list[SlotMatch]:
    out = []
    for r, h in _pair_docs(ref, hyp):
        if gold_spans:
            h = project_gold_spans(r, h, ref.schema)
        out.extend(align_slots(r, h))
    return out


def evaluation_report(ref: Corpus, hyp: Corpus, gold_spans: bool = False,
                      merge: Mapping[str, str] | None = None, baseline: Corpus | None = None,
                      labels: Sequence[str] | None = None) -> ScoreReport:
    """Per-label P/R/F rows, SER and the subtype confusion matrix."""
    if merge:
        ref, hyp = merge_subtypes(ref, merge), merge_subtypes(hyp, merge)
        if baseline is not None:
            baseline = merge_subtypes(baseline, merge)
    matches = _matches(ref, hyp, gold_spans)
    if labels is None:
        seen = {m.ref.label for m in matches if m.ref is not None}
        seen |= {m.hyp.label for m in matches if m.hyp is not None}
        labels = sorted(seen)
    rows = [(label, score_prf(matches, label)) for label in labels]
    confusion = Counter((m.ref.label, m.hyp.label) for m in matches
                        if m.status in (CORRECT, SUBSTITUTION))
    n_ref = sum(1 for m in matches if m.ref is not None)
    ser = slot_error_rate(matches) if n_ref else 0.0
    report = ScoreReport(rows, ser, confusion)
    if baseline is not None:
        bm = _matches(ref, baseline, gold_spans)
        report.baseline_rows = [(label, score_prf(bm, label)) for label in labels]
        report.baseline_ser = slot_error_rate(bm) if n_ref else 0.0
    return report


def subtype_accuracy(ref: Corpus, hyp: Corpus, main_type: str | None = None) -> float:
    """Share of reference subtype-bearing slots whose label the hypothesis
    reproduces on the same boundaries."""
    total = right = 0
    for r, h in _pair_docs(ref, hyp):
        for m in align_slots(r, h):
            if m.ref is None or m.ref.sub_type is None:
                continue
            if main_type is not None and m.ref.main_type != main_type:
                continue
            total += 1
            right += m.status == CORRECT
    return right / total if total else 0.0
