"""Characteristic-feature selection and rule induction.

A feature (or conjunction of features) is characteristic of a subtype when
it is abnormally frequent among that subtype's occurrences. The probability
level is the hypergeometric tail under random distribution of the feature
across categories: with ``T`` occurrences in total, ``F`` of which carry the
feature, the count among the ``t`` occurrences of a category is
hypergeometric. Smaller probability levels mean more characteristic.

Rules are then chosen greedily, by discriminative power, to cover the
training occurrences of the non-default subtypes.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.special import gammaln

from .corpus import TagSchema
from .features import FeatureId, FeatureVector, Vocabulary


class DomainError(ValueError):
    pass


class MissingGold(ValueError):
    pass


class ZeroSupport(ValueError):
    pass


class RulesFormatError(ValueError):
    pass


# -- hypergeometric tails -------------------------------------------------

class _LogFactorials:
    """log(x!) for integer arrays; negative arguments map to +inf so the
    corresponding hypergeometric terms vanish without masking."""

    def __init__(self):
        self._grow(1024)

    def _grow(self, size: int) -> None:
        self.size = size
        self.table = np.concatenate([np.full(size, np.inf), gammaln(np.arange(1, size + 1, dtype=np.float64))])

    def __call__(self, x: np.ndarray) -> np.ndarray:
        lo, hi = int(x.min(initial=0)), int(x.max(initial=0))
        if hi >= self.size or -lo > self.size:
            self._grow(2 * max(hi + 1, -lo))
        return self.table[x + self.size]


_log_factorial = _LogFactorials()


def hypergeom_tail(k, K, n, N, direction: str = "over"):
    """Tail probability of X ~ Hypergeometric(N, K, n).

    ``direction="over"`` gives P(X >= k) and ``"under"`` gives P(X <= k).
    Arguments broadcast like numpy arrays; plain integers give a float.

    The probability mass is built from log-factorials, normalised over the
    support, and accumulated in order, so the two tails of a split point sum
    to one up to rounding.
    """
    if direction not in ("over", "under"):
        raise DomainError(f"direction must be 'over' or 'under', not {direction!r}")
    scalar = all(np.ndim(a) == 0 for a in (k, K, n, N))
    k, K, n, N = (np.asarray(a) for a in (k, K, n, N))
    for a in (k, K, n, N):
        if a.dtype.kind not in "iu":
            if not np.all(np.mod(a, 1) == 0):
                raise DomainError("hypergeometric arguments must be integers")
    k, K, n, N = (a.astype(np.int64) for a in (k, K, n, N))
    if np.any(N < 0) or np.any(K < 0) or np.any(K > N) or np.any(n < 0) or np.any(n > N):
        raise DomainError("need 0 <= K <= N and 0 <= n <= N")
    hi = np.minimum(K, n)
    if np.any(k < 0) or np.any(k > np.broadcast_to(hi, np.broadcast_shapes(k.shape, hi.shape))):
        raise DomainError("need 0 <= k <= min(K, n)")

    K, n, N = np.broadcast_arrays(K, n, N)
    lo = np.maximum(0, n - (N - K))
    hi = np.minimum(K, n)
    j = np.arange(int(hi.max(initial=0)) + 1)
    Kx, nx, Nx = K[..., None], n[..., None], N[..., None]
    # terms outside [lo, hi] get a +inf log-factorial and so zero mass
    logp = -_log_factorial(j) - _log_factorial(Kx - j) - _log_factorial(nx - j)
    logp -= _log_factorial(Nx - Kx - nx + j)
    logp -= logp.max(axis=-1, keepdims=True)
    mass = np.exp(logp, out=logp)
    if direction == "under":
        cum = np.cumsum(mass, axis=-1)
        total = cum[..., -1:]
    else:
        cum = np.cumsum(mass[..., ::-1], axis=-1)[..., ::-1]
        total = cum[..., :1]

    shape = np.broadcast_shapes(k.shape, K.shape)
    cum = np.broadcast_to(cum, shape + cum.shape[-1:])
    kb = np.broadcast_to(k, shape)
    out = np.take_along_axis(cum, kb[..., None], axis=-1)[..., 0]
    out = out / np.broadcast_to(total[..., 0], shape)
    full = np.broadcast_to(lo if direction == "over" else hi, shape)
    out = np.where(kb <= full if direction == "over" else kb >= full, 1.0, out)
    out = np.clip(out, 0.0, 1.0)
    return float(out) if scalar else out


# -- statistics -----------------------------------------------------------

@dataclass(frozen=True)
class FeatureStats:
    feature: FeatureId | tuple[FeatureId, ...]
    category: str
    f: int
    t: int
    F: int
    T: int

    def __post_init__(self):
        if not (0 <= self.f <= min(self.F, self.t) and self.F <= self.T and self.t <= self.T):
            raise DomainError(f"inconsistent counts {self}")


@dataclass(frozen=True)
class SpecificityScore:
    feature: FeatureId | tuple[FeatureId, ...]
    category: str
    direction: str
    p_level: float


def count_feature_stats(vectors: Sequence[FeatureVector]) -> list[FeatureStats]:
    """One row per (feature, category) seen in ``vectors``."""
    if any(v.gold_subtype is None for v in vectors):
        raise MissingGold("every training vector needs a gold subtype")
    T = len(vectors)
    if T == 0:
        return []
    by_cat: dict[str, int] = {}
    pair: dict[tuple[FeatureId, str], int] = {}
    total: dict[FeatureId, int] = {}
    for v in vectors:
        by_cat[v.gold_subtype] = by_cat.get(v.gold_subtype, 0) + 1
        for feat in v.active:
            total[feat] = total.get(feat, 0) + 1
            key = (feat, v.gold_subtype)
            pair[key] = pair.get(key, 0) + 1
    rows = []
    for feat in sorted(total):
        for cat in sorted(by_cat):
            rows.append(FeatureStats(feat, cat, pair.get((feat, cat), 0), by_cat[cat], total[feat], T))
    return rows


@lru_cache(maxsize=1 << 16)
def _specificity(f: int, t: int, F: int, T: int) -> tuple[str, float]:
    if f * T >= F * t:
        return "over", hypergeom_tail(f, F, t, T, "over")
    return "under", hypergeom_tail(f, F, t, T, "under")


def specificity_score(s: FeatureStats) -> SpecificityScore:
    direction, p = _specificity(s.f, s.t, s.F, s.T)
    return SpecificityScore(s.feature, s.category, direction, p)


def _as_tuple(features) -> tuple[FeatureId, ...]:
    if isinstance(features, FeatureId):
        return (features,)
    return tuple(sorted(set(features)))


def discriminative_power(feature_conjunction, target: str,
                         vectors: Sequence[FeatureVector]) -> tuple[float, int]:
    """Share of the vectors firing the conjunction whose gold subtype is ``target``."""
    conj = _as_tuple(feature_conjunction)
    support = hits = 0
    for v in vectors:
        if all(f in v.active for f in conj):
            support += 1
            hits += v.gold_subtype == target
    if support == 0:
        raise ZeroSupport(f"{render_features(conj)} never fires")
    return hits / support, support


def conjunction_stats(feature_conjunction, target: str,
                      vectors: Sequence[FeatureVector]) -> FeatureStats:
    conj = _as_tuple(feature_conjunction)
    f = t = F = 0
    for v in vectors:
        on = all(x in v.active for x in conj)
        pos = v.gold_subtype == target
        F += on
        t += pos
        f += on and pos
    return FeatureStats(conj, target, f, t, F, len(vectors))


# -- rules ----------------------------------------------------------------

def render_features(features: Iterable[FeatureId]) -> str:
    return "&".join(str(f) for f in _as_tuple(features))


@dataclass(frozen=True)
class Rule:
    features: tuple[FeatureId, ...]
    target: str
    p_level: float
    disc_power: float
    support: int

    @property
    def text(self) -> str:
        return render_features(self.features)

    def fires(self, active) -> bool:
        return all(f in active for f in self.features)

    def sort_key(self):
        return (-self.disc_power, self.p_level, self.text, self.target)


@dataclass(frozen=True)
class RuleSet:
    main_type: str
    rules: tuple[Rule, ...] = ()
    alpha: float = 0.05
    min_support: int = 3
    max_order: int = 2
    min_dp: float = 0.6

    def first_match(self, active) -> Rule | None:
        for rule in self.rules:
            if rule.fires(active):
                return rule
        return None

    def __len__(self):
        return len(self.rules)


def induce_rules(vectors: Sequence[FeatureVector], schema: TagSchema, alpha: float = 0.05,
                 min_support: int = 3, max_order: int = 2, min_dp: float = 0.6) -> dict[str, RuleSet]:
    """Induce one :class:`RuleSet` per main type with subtypes."""
    if max_order < 1:
        raise ValueError("max_order must be >= 1")
    by_main: dict[str, list[FeatureVector]] = {}
    for v in vectors:
        if v.gold_subtype is None:
            raise MissingGold("every training vector needs a gold subtype")
        if schema.has_subtypes(v.main_type):
            by_main.setdefault(v.main_type, []).append(v)
    params = dict(alpha=alpha, min_support=min_support, max_order=max_order, min_dp=min_dp)
    out = {}
    for main in sorted(by_main):
        rules = _induce_main(by_main[main], schema.default_subtype[main], **params)
        out[main] = RuleSet(main, tuple(rules), **params)
    return out


def _induce_main(vectors, default, alpha, min_support, max_order, min_dp) -> list[Rule]:
    T = len(vectors)
    vocab = Vocabulary(f for v in vectors for f in v.active)
    X = np.zeros((T, len(vocab)), dtype=bool)
    for r, v in enumerate(vectors):
        X[r, [vocab[f] for f in v.active]] = True
    gold = np.array([v.gold_subtype for v in vectors], dtype=object)
    targets = sorted(set(gold) - {default})
    if not targets or len(vocab) == 0:
        return []
    pos_mask = {c: gold == c for c in targets}
    tcount = {c: int(m.sum()) for c, m in pos_mask.items()}
    F1 = X.sum(axis=0)

    # members must be over-represented for at least one non-default subtype
    over_any = np.zeros(len(vocab), dtype=bool)
    for c in targets:
        f1 = X[pos_mask[c]].sum(axis=0)
        over_any |= (f1 * T >= F1 * tcount[c]) & (f1 > 0)

    @lru_cache(maxsize=None)
    def pcache(cols, c):
        on = X[:, list(cols)].all(axis=1)
        f = int((on & pos_mask[c]).sum())
        return _specificity(f, tcount[c], int(on.sum()), T)

    candidates: list[Rule] = []
    levels = [[(i,) for i in range(len(vocab)) if F1[i] >= min_support]]
    for order in range(2, max_order + 1):
        if order == 2:
            levels.append(_pairs(X, [c[0] for c in levels[0] if over_any[c[0]]], min_support))
        else:
            levels.append(_extend(X, levels[-1], over_any, min_support))
        if not levels[-1]:
            break
    for order, level in enumerate(levels, 1):
        for cols in level:
            on = X[:, list(cols)].all(axis=1)
            support = int(on.sum())
            for c in targets:
                f = int((on & pos_mask[c]).sum())
                dp = f / support
                if dp < min_dp:
                    continue
                direction, p = _specificity(f, tcount[c], support, T)
                if direction != "over" or p > alpha:
                    continue
                # a conjunction must be more specific than each of its parts
                if order > 1 and any(pcache(sub, c)[1] <= p
                                     for sub in itertools.combinations(cols, order - 1)):
                    continue
                feats = tuple(vocab.feature(i) for i in cols)
                candidates.append(Rule(feats, c, p, dp, support))

    candidates.sort(key=Rule.sort_key)
    index = {}
    uncovered = {c: set(np.flatnonzero(pos_mask[c]).tolist()) for c in targets}
    chosen = []
    for rule in candidates:
        if not any(uncovered.values()):
            break
        cols = [vocab[f] for f in rule.features]
        key = tuple(cols)
        if key not in index:
            index[key] = set(np.flatnonzero(X[:, cols].all(axis=1)).tolist())
        newly = index[key] & uncovered[rule.target]
        if newly:
            chosen.append(rule)
            uncovered[rule.target] -= newly
    return chosen


def _pairs(X, base, min_support):
    if len(base) < 2:
        return []
    sub = X[:, base].astype(np.int32)
    co = sub.T @ sub
    ii, jj = np.nonzero(np.triu(co >= min_support, k=1))
    return [(base[i], base[j]) for i, j in zip(ii.tolist(), jj.tolist())]


def _extend(X, prev, over_any, min_support):
    prev_set = set(prev)
    out = []
    for a, b in itertools.combinations(prev, 2):
        if a[:-1] != b[:-1]:
            continue
        cand = a + (b[-1],)
        if not all(over_any[i] for i in cand):
            continue
        if not all(s in prev_set for s in itertools.combinations(cand, len(cand) - 1)):
            continue
        if X[:, list(cand)].all(axis=1).sum() >= min_support:
            out.append(cand)
    return out


def rule_stats(rule: Rule, vectors: Sequence[FeatureVector]) -> tuple[float, float, int]:
    """Recompute ``(p_level, disc_power, support)`` for ``rule`` on ``vectors``."""
    s = conjunction_stats(rule.features, rule.target, vectors)
    dp, support = discriminative_power(rule.features, rule.target, vectors)
    return specificity_score(s).p_level, dp, support


# -- rules files ----------------------------------------------------------

def format_rules(rulesets: Mapping[str, RuleSet] | Iterable[RuleSet],
                 config: Mapping[str, object] | None = None) -> str:
    sets = list(rulesets.values()) if isinstance(rulesets, Mapping) else list(rulesets)
    lines = []
    if sets:
        r0 = sets[0]
        lines.append(f"#rules alpha={r0.alpha!r} min_support={r0.min_support} "
                     f"max_order={r0.max_order} min_dp={r0.min_dp!r}")
    else:
        lines.append("#rules")
    for key, value in (config or {}).items():
        lines.append(f"#config {key}={value}")
    for rs in sets:
        lines.append(f"#ruleset {rs.main_type}")
        for r in rs.rules:
            lines.append("\t".join([rs.main_type, r.text, r.target, repr(r.p_level),
                                    repr(r.disc_power), str(r.support)]))
    return "\n".join(lines) + "\n"


def parse_rules(text: str) -> dict[str, RuleSet]:
    params: dict[str, object] = {}
    order: list[str] = []
    rules: dict[str, list[Rule]] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        if line.startswith("#rules"):
            for item in line.split()[1:]:
                key, _, value = item.partition("=")
                if key in ("alpha", "min_dp"):
                    params[key] = float(value)
                elif key in ("min_support", "max_order"):
                    params[key] = int(value)
            continue
        if line.startswith("#ruleset"):
            main = line.split()[1]
            order.append(main)
            rules.setdefault(main, [])
            continue
        if line.startswith("#"):
            continue
        cols = line.split("\t")
        if len(cols) != 6:
            raise RulesFormatError(f"line {lineno}: expected 6 columns, got {len(cols)}")
        main, feats, target, p, dp, support = cols
        try:
            feature_ids = tuple(FeatureId.parse(x) for x in feats.split("&"))
            rule = Rule(feature_ids, target, float(p), float(dp), int(support))
        except ValueError as exc:
            raise RulesFormatError(f"line {lineno}: {exc}") from exc
        if main not in rules:
            order.append(main)
            rules[main] = []
        rules[main].append(rule)
    return {m: RuleSet(m, tuple(rules[m]), **params) for m in order}


def write_rules(path, rulesets, config=None) -> None:
    from .util import atomic_write

    atomic_write(path, format_rules(rulesets, config))


def read_rules(path) -> dict[str, RuleSet]:
    return parse_rules(Path(path).read_text(encoding="utf-8"))
