"""Registry of the binary-classification performance scores.

Every score is expressed in its standardized form, a function of (tp, tn, p, n) only, together with
closed-form inverse solutions for tp (given tn) and for tn (given tp). The inverses are evaluated on an
interval of admissible score values and return a superset of the real solutions, which is what the
consistency tests need: they never miss a confusion matrix that produces a reported value.

Forward forms take ``Fraction`` arguments and return a ``Fraction`` for rational scores. Scores with a
square root (gm, fm, mcc, pt) return an :class:`~scoreforge.interval.Interval` enclosing the true value.
"""

from __future__ import annotations

import difflib
import logging
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Mapping, Optional, Union

from scoreforge.exceptions import EmptyDomainError, UndefinedScoreError, UnknownScoreError
from scoreforge.interval import EMPTY, WHOLE_LINE, Interval, IntervalSet, Value, WholeLine, sqrt

logger = logging.getLogger(__name__)

ScoreValue = Union[Fraction, Interval, WholeLine]
ForwardFn = Callable[[Fraction, Fraction, Fraction, Fraction, "ScoreParams"], ScoreValue]
# (value, known, p, n, params) -> solutions for the unknown; None means no solution on this branch
InverseFn = Callable[[Interval, Fraction, Fraction, Fraction, "ScoreParams"], Optional[Value]]

LINEAR_SCORE_IDS = frozenset({"acc", "sens", "spec", "bacc"})


@dataclass(frozen=True)
class ScoreParams:
    """Parameters of the F-beta scores: beta_plus for fbp, beta_minus for fbn."""

    beta_plus: Fraction = Fraction(1)
    beta_minus: Fraction = Fraction(1)

    def __post_init__(self) -> None:
        for name in ("beta_plus", "beta_minus"):
            value = Fraction(getattr(self, name))
            if value <= 0:
                raise ValueError(f"{name} must be positive, got {value}")
            object.__setattr__(self, name, value)


DEFAULT_PARAMS = ScoreParams()


@dataclass(frozen=True)
class ConfusionCounts:
    """A binary confusion matrix given by its two degrees of freedom and the class sizes."""

    tp: int
    tn: int
    p: int
    n: int

    def __post_init__(self) -> None:
        if self.p < 1 or self.n < 1:
            raise ValueError(f"class sizes must be positive, got p={self.p}, n={self.n}")
        if not 0 <= self.tp <= self.p:
            raise ValueError(f"tp={self.tp} outside [0, {self.p}]")
        if not 0 <= self.tn <= self.n:
            raise ValueError(f"tn={self.tn} outside [0, {self.n}]")

    @property
    def fp(self) -> int:
        return self.n - self.tn

    @property
    def fn(self) -> int:
        return self.p - self.tp

    def scaled(self, factor: int) -> ConfusionCounts:
        return ConfusionCounts(self.tp * factor, self.tn * factor, self.p * factor, self.n * factor)


@dataclass(frozen=True)
class ScoreDefinition:
    """One performance score: forward form, inverse branches and value range.

    ``inverse_tp`` branches solve for tp given tn; ``inverse_tn`` branches solve for tn given tp.
    Scores with two algebraic solutions have two branches, the union of which is the solution set.
    ``lower``/``upper`` bound the attainable values (None meaning unbounded).
    """

    id: str
    name: str
    forward: ForwardFn
    inverse_tp: tuple[InverseFn, ...]
    inverse_tn: tuple[InverseFn, ...]
    linear_in_tp_tn: bool = False
    radical: bool = False
    lower: Optional[Fraction] = Fraction(0)
    upper: Optional[Fraction] = Fraction(1)
    aliases: tuple[str, ...] = ()

    def clip(self, value: Interval) -> Optional[Interval]:
        """Restrict a reported value interval to the attainable range; None when nothing remains."""
        return value.clip(self.lower, self.upper)


@dataclass(frozen=True)
class ResolvedScore:
    """A score name resolved against a registry, with the parameters an alias may pin (f1 -> fbp, beta_plus=1)."""

    definition: ScoreDefinition
    overrides: tuple[tuple[str, Fraction], ...] = ()

    def params_for(self, base: ScoreParams) -> ScoreParams:
        if not self.overrides:
            return base
        return replace(base, **dict(self.overrides))


def _mobius(v: Interval, a: Fraction, b: Fraction, c: Fraction, d: Fraction) -> Value:
    """Exact image of v under x -> (a*x + b) / (c*x + d).

    The map is monotone between poles, so the image of an interval avoiding the pole is spanned by the
    images of its endpoints.
    """
    den_lo = c * v.lo + d
    den_hi = c * v.hi + d
    if den_lo == 0 or den_hi == 0 or (den_lo < 0) != (den_hi < 0):
        return WHOLE_LINE
    f_lo = (a * v.lo + b) / den_lo
    f_hi = (a * v.hi + b) / den_hi
    return Interval(min(f_lo, f_hi), max(f_lo, f_hi))


def _linear(v: Interval, a: Fraction, b: Fraction) -> Interval:
    """Image of v under x -> a*x + b."""
    lo, hi = a * v.lo + b, a * v.hi + b
    return Interval(min(lo, hi), max(lo, hi))


_ZERO = Fraction(0)
_ONE = Fraction(1)


# ---------------------------------------------------------------------------
# Linear scores
# ---------------------------------------------------------------------------

def _acc(tp: Fraction, tn: Fraction, p: Fraction, n: Fraction, params: ScoreParams) -> ScoreValue:
    return (tp + tn) / (p + n)


def _acc_tp(v: Interval, tn: Fraction, p: Fraction, n: Fraction, params: ScoreParams) -> Optional[Value]:
    return _linear(v, p + n, -tn)


def _acc_tn(v: Interval, tp: Fraction, p: Fraction, n: Fraction, params: ScoreParams) -> Optional[Value]:
    return _linear(v, p + n, -tp)


def _sens(tp: Fraction, tn: Fraction, p: Fraction, n: Fraction, params: ScoreParams) -> ScoreValue:
    return tp / p


def _sens_tp(v: Interval, tn: Fraction, p: Fraction, n: Fraction, params: ScoreParams) -> Optional[Value]:
    return _linear(v, p, _ZERO)


def _sens_tn(v: Interval, tp: Fraction, p: Fraction, n: Fraction, params: ScoreParams) -> Optional[Value]:
    # sensitivity does not involve tn
    return WHOLE_LINE if v.contains(tp / p) else None


def _spec(tp: Fraction, tn: Fraction, p: Fraction, n: Fraction, params: ScoreParams) -> ScoreValue:
    return tn / n


def _spec_tp(v: Interval, tn: Fraction, p: Fraction, n: Fraction, params: ScoreParams) -> Optional[Value]:
    return WHOLE_LINE if v.contains(tn / n) else None


def _spec_tn(v: Interval, tp: Fraction, p: Fraction, n: Fraction, params: ScoreParams) -> Optional[Value]:
    return _linear(v, n, _ZERO)


def _bacc(tp: Fraction, tn: Fraction, p: Fraction, n: Fraction, params: ScoreParams) -> ScoreValue:
    return tp / (2 * p) + tn / (2 * n)


def _bacc_tp(v: Interval, tn: Fraction, p: Fraction, n: Fraction, params: ScoreParams) -> Optional[Value]:
    return _linear(v, 2 * p, -p * tn / n)


def _bacc_tn(v: Interval, tp: Fraction, p: Fraction, n: Fraction, params: ScoreParams) -> Optional[Value]:
    return _linear(v, 2 * n, -n * tp / p)


# ---------------------------------------------------------------------------
# Rational scores with a single solution
# ---------------------------------------------------------------------------

def _ppv(tp: Fraction, tn: Fraction, p: Fraction, n: Fraction, params: ScoreParams) -> ScoreValue:
    return tp / (tp + n - tn)


def _ppv_tp(v: Interval, tn: Fraction, p: Fraction, n: Fraction, params: ScoreParams) -> Optional[Value]:
    return _mobius(v, n - tn, _ZERO, -_ONE, _ONE)


def _ppv_tn(v: Interval, tp: Fraction, p: Fraction, n: Fraction, params: ScoreParams) -> Optional[Value]:
    return _mobius(v, n + tp, -tp, _ONE, _ZERO)


def _npv(tp: Fraction, tn: Fraction, p: Fraction, n: Fraction, params: ScoreParams) -> ScoreValue:
    return tn / (tn + p - tp)


def _npv_tp(v: Interval, tn: Fraction, p: Fraction, n: Fraction, params: ScoreParams) -> Optional[Value]:
    return _mobius(v, p + tn, -tn, _ONE, _ZERO)


def _npv_tn(v: Interval, tp: Fraction, p: Fraction, n: Fraction, params: ScoreParams) -> Optional[Value]:
    return _mobius(v, p - tp, _ZERO, -_ONE, _ONE)


def _fbp(tp: Fraction, tn: Fraction, p: Fraction, n: Fraction, params: ScoreParams) -> ScoreValue:
    b2 = params.beta_plus * params.beta_plus
    return tp * (1 + b2) / (b2 * p + n - tn + tp)


def _fbp_tp(v: Interval, tn: Fraction, p: Fraction, n: Fraction, params: ScoreParams) -> Optional[Value]:
    b2 = params.beta_plus * params.beta_plus
    return _mobius(v, b2 * p + n - tn, _ZERO, -_ONE, b2 + 1)


def _fbp_tn(v: Interval, tp: Fraction, p: Fraction, n: Fraction, params: ScoreParams) -> Optional[Value]:
    b2 = params.beta_plus * params.beta_plus
    return _mobius(v, b2 * p + n + tp, -tp * (1 + b2), _ONE, _ZERO)


def _fbn(tp: Fraction, tn: Fraction, p: Fraction, n: Fraction, params: ScoreParams) -> ScoreValue:
    b2 = params.beta_minus * params.beta_minus
    return tn * (1 + b2) / (b2 * n + p - tp + tn)


def _fbn_tp(v: Interval, tn: Fraction, p: Fraction, n: Fraction, params: ScoreParams) -> Optional[Value]:
    b2 = params.beta_minus * params.beta_minus
    return _mobius(v, b2 * n + p + tn, -tn * (1 + b2), _ONE, _ZERO)


def _fbn_tn(v: Interval, tp: Fraction, p: Fraction, n: Fraction, params: ScoreParams) -> Optional[Value]:
    b2 = params.beta_minus * params.beta_minus
    return _mobius(v, b2 * n + p - tp, _ZERO, -_ONE, b2 + 1)


def _bm(tp: Fraction, tn: Fraction, p: Fraction, n: Fraction, params: ScoreParams) -> ScoreValue:
    return tp / p + tn / n - 1


def _bm_tp(v: Interval, tn: Fraction, p: Fraction, n: Fraction, params: ScoreParams) -> Optional[Value]:
    return _linear(v, p, p * (1 - tn / n))


def _bm_tn(v: Interval, tp: Fraction, p: Fraction, n: Fraction, params: ScoreParams) -> Optional[Value]:
    return _linear(v, n, n * (1 - tp / p))


def _lrp(tp: Fraction, tn: Fraction, p: Fraction, n: Fraction, params: ScoreParams) -> ScoreValue:
    return n * tp / (p * (n - tn))


def _lrp_tp(v: Interval, tn: Fraction, p: Fraction, n: Fraction, params: ScoreParams) -> Optional[Value]:
    return _linear(v, p * (n - tn) / n, _ZERO)


def _lrp_tn(v: Interval, tp: Fraction, p: Fraction, n: Fraction, params: ScoreParams) -> Optional[Value]:
    return _mobius(v, n * p, -n * tp, p, _ZERO)


def _lrn(tp: Fraction, tn: Fraction, p: Fraction, n: Fraction, params: ScoreParams) -> ScoreValue:
    return n * (p - tp) / (p * tn)


def _lrn_tp(v: Interval, tn: Fraction, p: Fraction, n: Fraction, params: ScoreParams) -> Optional[Value]:
    return _linear(v, -p * tn / n, p)


def _lrn_tn(v: Interval, tp: Fraction, p: Fraction, n: Fraction, params: ScoreParams) -> Optional[Value]:
    return _mobius(v, _ZERO, n * (p - tp), p, _ZERO)


def _dor(tp: Fraction, tn: Fraction, p: Fraction, n: Fraction, params: ScoreParams) -> ScoreValue:
    return tp * tn / ((n - tn) * (p - tp))


def _dor_tp(v: Interval, tn: Fraction, p: Fraction, n: Fraction, params: ScoreParams) -> Optional[Value]:
    return _mobius(v, p * (n - tn), _ZERO, n - tn, tn)


def _dor_tn(v: Interval, tp: Fraction, p: Fraction, n: Fraction, params: ScoreParams) -> Optional[Value]:
    return _mobius(v, n * (p - tp), _ZERO, p - tp, tp)


def _ji(tp: Fraction, tn: Fraction, p: Fraction, n: Fraction, params: ScoreParams) -> ScoreValue:
    return tp / (n + p - tn)


def _ji_tp(v: Interval, tn: Fraction, p: Fraction, n: Fraction, params: ScoreParams) -> Optional[Value]:
    return _linear(v, n + p - tn, _ZERO)


def _ji_tn(v: Interval, tp: Fraction, p: Fraction, n: Fraction, params: ScoreParams) -> Optional[Value]:
    return _mobius(v, n + p, -tp, _ONE, _ZERO)


def _kappa(tp: Fraction, tn: Fraction, p: Fraction, n: Fraction, params: ScoreParams) -> ScoreValue:
    return (2 * n * tp + 2 * p * tn - 2 * n * p) / (n * n - n * tn + n * tp + p * p + p * tn - p * tp)


def _kappa_tp(v: Interval, tn: Fraction, p: Fraction, n: Fraction, params: ScoreParams) -> Optional[Value]:
    return _mobius(v, p * p + p * tn + n * n - n * tn, 2 * n * p - 2 * p * tn, p - n, 2 * n)


def _kappa_tn(v: Interval, tp: Fraction, p: Fraction, n: Fraction, params: ScoreParams) -> Optional[Value]:
    return _mobius(v, n * n + n * tp + p * p - p * tp, 2 * n * p - 2 * n * tp, n - p, 2 * p)


# ---------------------------------------------------------------------------
# Scores with square roots
# ---------------------------------------------------------------------------

def _gm(tp: Fraction, tn: Fraction, p: Fraction, n: Fraction, params: ScoreParams) -> ScoreValue:
    return sqrt(tp * tn / (p * n))


def _gm_tp(v: Interval, tn: Fraction, p: Fraction, n: Fraction, params: ScoreParams) -> Optional[Value]:
    if tn == 0:
        return WHOLE_LINE if v.contains_zero() else None
    return v.square() * (p * n / tn)


def _gm_tn(v: Interval, tp: Fraction, p: Fraction, n: Fraction, params: ScoreParams) -> Optional[Value]:
    if tp == 0:
        return WHOLE_LINE if v.contains_zero() else None
    return v.square() * (p * n / tp)


def _fm(tp: Fraction, tn: Fraction, p: Fraction, n: Fraction, params: ScoreParams) -> ScoreValue:
    return tp / sqrt(p * (tp + n - tn))


def _fm_tp(v: Interval, tn: Fraction, p: Fraction, n: Fraction, params: ScoreParams, sign: int) -> Optional[Value]:
    # tp**2 - v**2 p tp - v**2 p (n - tn) = 0
    sp = v.square() * p
    root = sqrt(sp.square() + sp * (4 * (n - tn)))
    return (sp + root) / 2 if sign > 0 else (sp - root) / 2


def _fm_tp_plus(v: Interval, tn: Fraction, p: Fraction, n: Fraction, params: ScoreParams) -> Optional[Value]:
    return _fm_tp(v, tn, p, n, params, +1)


def _fm_tp_minus(v: Interval, tn: Fraction, p: Fraction, n: Fraction, params: ScoreParams) -> Optional[Value]:
    return _fm_tp(v, tn, p, n, params, -1)


def _fm_tn(v: Interval, tp: Fraction, p: Fraction, n: Fraction, params: ScoreParams) -> Optional[Value]:
    return (n + tp) - (tp * tp / p) / v.square()


def _mcc(tp: Fraction, tn: Fraction, p: Fraction, n: Fraction, params: ScoreParams) -> ScoreValue:
    return (tp * tn - (n - tn) * (p - tp)) / sqrt(n * p * (n - tn + tp) * (p + tn - tp))


def _mcc_solve(v: Interval, known: Fraction, own: Fraction, other: Fraction, sign: int) -> Optional[Value]:
    """Solve mcc for the unknown count of the class of size ``own``, the other class count being ``known``.

    With B the number of predictions for the other class, squaring the definition gives
    own (own + v**2 other) B**2 - N own (2 known + v**2 other) B + N**2 known**2 = 0.
    """
    total = own + other
    s = v.square()
    q = s * (own * other) + (4 * own * known - 4 * known * known)
    root = sqrt(s * (own * other) * q)
    center = (2 * known + s * other) * own
    b = (center + root if sign > 0 else center - root) * total / ((own + s * other) * (2 * own))
    return (other + known) - b


def _mcc_tp_plus(v: Interval, tn: Fraction, p: Fraction, n: Fraction, params: ScoreParams) -> Optional[Value]:
    return _mcc_solve(v, tn, n, p, +1)


def _mcc_tp_minus(v: Interval, tn: Fraction, p: Fraction, n: Fraction, params: ScoreParams) -> Optional[Value]:
    return _mcc_solve(v, tn, n, p, -1)


def _mcc_tn_plus(v: Interval, tp: Fraction, p: Fraction, n: Fraction, params: ScoreParams) -> Optional[Value]:
    return _mcc_solve(v, tp, p, n, +1)


def _mcc_tn_minus(v: Interval, tp: Fraction, p: Fraction, n: Fraction, params: ScoreParams) -> Optional[Value]:
    return _mcc_solve(v, tp, p, n, -1)


def _mk(tp: Fraction, tn: Fraction, p: Fraction, n: Fraction, params: ScoreParams) -> ScoreValue:
    return tn / (p + tn - tp) + tp / (n - tn + tp) - 1


def _mk_solve(v: Interval, known: Fraction, own: Fraction, other: Fraction, sign: int) -> Optional[Value]:
    """Solve mk for the unknown count, ``own`` being the size of the unknown's class.

    unknown = (own - other + 2 known)/2 - other/(2v) +- sqrt(N**2/4 + N (other - 2 known)/(2v) + other**2/(4 v**2))
    """
    w = _mobius(v, _ZERO, _ONE, _ONE, _ZERO)
    if isinstance(w, WholeLine):
        return WHOLE_LINE
    total = own + other
    root = sqrt(total * total / 4 + w * (total * (other - 2 * known) / 2) + w.square() * (other * other / 4))
    center = (own - other + 2 * known) / 2 - w * (other / 2)
    return center + root if sign > 0 else center - root


def _mk_tp_plus(v: Interval, tn: Fraction, p: Fraction, n: Fraction, params: ScoreParams) -> Optional[Value]:
    return _mk_solve(v, tn, p, n, +1)


def _mk_tp_minus(v: Interval, tn: Fraction, p: Fraction, n: Fraction, params: ScoreParams) -> Optional[Value]:
    return _mk_solve(v, tn, p, n, -1)


def _mk_tn_plus(v: Interval, tp: Fraction, p: Fraction, n: Fraction, params: ScoreParams) -> Optional[Value]:
    return _mk_solve(v, tp, n, p, +1)


def _mk_tn_minus(v: Interval, tp: Fraction, p: Fraction, n: Fraction, params: ScoreParams) -> Optional[Value]:
    return _mk_solve(v, tp, n, p, -1)


def _upm(tp: Fraction, tn: Fraction, p: Fraction, n: Fraction, params: ScoreParams) -> ScoreValue:
    total = p + n
    return 4 * tp * tn / (tn * (total - tn + tp) + tp * (total + tn - tp))


def _upm_solve(v: Interval, known: Fraction, p: Fraction, n: Fraction, sign: int) -> Optional[Value]:
    """Solve upm for the unknown count; upm is symmetric in (tp, tn), so one formula serves both.

    unknown = (N + 2 known)/2 - 2 known/v +- sqrt((N**2 + 8 N known)/4 - (2 N known + 4 known**2)/v + 4 known**2/v**2)
    """
    w = _mobius(v, _ZERO, _ONE, _ONE, _ZERO)
    if isinstance(w, WholeLine):
        return WHOLE_LINE
    total = p + n
    root = sqrt((total * total + 8 * total * known) / 4 - w * (2 * total * known + 4 * known * known) + w.square() * (4 * known * known))
    center = (total + 2 * known) / 2 - w * (2 * known)
    return center + root if sign > 0 else center - root


def _upm_tp_plus(v: Interval, tn: Fraction, p: Fraction, n: Fraction, params: ScoreParams) -> Optional[Value]:
    return _upm_solve(v, tn, p, n, +1)


def _upm_tp_minus(v: Interval, tn: Fraction, p: Fraction, n: Fraction, params: ScoreParams) -> Optional[Value]:
    return _upm_solve(v, tn, p, n, -1)


def _upm_tn_plus(v: Interval, tp: Fraction, p: Fraction, n: Fraction, params: ScoreParams) -> Optional[Value]:
    return _upm_solve(v, tp, p, n, +1)


def _upm_tn_minus(v: Interval, tp: Fraction, p: Fraction, n: Fraction, params: ScoreParams) -> Optional[Value]:
    return _upm_solve(v, tp, p, n, -1)


def _pt(tp: Fraction, tn: Fraction, p: Fraction, n: Fraction, params: ScoreParams) -> ScoreValue:
    # (sqrt(tpr * fpr) - fpr) / (tpr - fpr)
    tpr = tp / p
    fpr = (n - tn) / n
    return (sqrt(tpr * fpr) - fpr) / (tpr - fpr)


def _pt_tp(v: Interval, tn: Fraction, p: Fraction, n: Fraction, params: ScoreParams) -> Optional[Value]:
    # tpr = fpr * ((1 - v) / v)**2; the other root, tpr = fpr, is the pole
    ratio = _mobius(v, -_ONE, _ONE, _ONE, _ZERO)
    if isinstance(ratio, WholeLine):
        return WHOLE_LINE
    return ratio.square() * (p * (n - tn) / n)


def _pt_tn(v: Interval, tp: Fraction, p: Fraction, n: Fraction, params: ScoreParams) -> Optional[Value]:
    ratio = _mobius(v, _ONE, _ZERO, -_ONE, _ONE)
    if isinstance(ratio, WholeLine):
        return WHOLE_LINE
    return n - ratio.square() * (n * tp / p)


_BUILTIN_DEFINITIONS: tuple[ScoreDefinition, ...] = (
    ScoreDefinition("acc", "accuracy", _acc, (_acc_tp,), (_acc_tn,), linear_in_tp_tn=True, aliases=("accuracy",)),
    ScoreDefinition("sens", "sensitivity", _sens, (_sens_tp,), (_sens_tn,), linear_in_tp_tn=True,
                    aliases=("sensitivity", "recall", "tpr", "true_positive_rate", "hit_rate")),
    ScoreDefinition("spec", "specificity", _spec, (_spec_tp,), (_spec_tn,), linear_in_tp_tn=True,
                    aliases=("specificity", "tnr", "selectivity", "true_negative_rate")),
    ScoreDefinition("ppv", "positive predictive value", _ppv, (_ppv_tp,), (_ppv_tn,),
                    aliases=("precision", "positive_predictive_value")),
    ScoreDefinition("npv", "negative predictive value", _npv, (_npv_tp,), (_npv_tn,), aliases=("negative_predictive_value",)),
    ScoreDefinition("fbp", "positive F-beta", _fbp, (_fbp_tp,), (_fbp_tn,), aliases=("f_beta_plus", "f_beta_positive")),
    ScoreDefinition("fbn", "negative F-beta", _fbn, (_fbn_tp,), (_fbn_tn,), aliases=("f_beta_minus", "f_beta_negative")),
    ScoreDefinition("upm", "unified performance measure", _upm, (_upm_tp_plus, _upm_tp_minus), (_upm_tn_plus, _upm_tn_minus),
                    aliases=("p4", "unified_performance_measure")),
    ScoreDefinition("gm", "geometric mean", _gm, (_gm_tp,), (_gm_tn,), radical=True, aliases=("geometric_mean", "g_mean")),
    ScoreDefinition("fm", "Fowlkes-Mallows index", _fm, (_fm_tp_plus, _fm_tp_minus), (_fm_tn,), radical=True,
                    aliases=("fowlkes_mallows", "fowlkes_mallows_index")),
    ScoreDefinition("mk", "markedness", _mk, (_mk_tp_plus, _mk_tp_minus), (_mk_tn_plus, _mk_tn_minus),
                    lower=Fraction(-1), aliases=("markedness", "deltap")),
    ScoreDefinition("bm", "bookmaker informedness", _bm, (_bm_tp,), (_bm_tn,), lower=Fraction(-1),
                    aliases=("informedness", "bookmaker_informedness", "youden_index")),
    ScoreDefinition("mcc", "Matthews correlation coefficient", _mcc, (_mcc_tp_plus, _mcc_tp_minus), (_mcc_tn_plus, _mcc_tn_minus),
                    radical=True, lower=Fraction(-1), aliases=("phi", "matthews_correlation_coefficient")),
    ScoreDefinition("lrp", "positive likelihood ratio", _lrp, (_lrp_tp,), (_lrp_tn,), upper=None,
                    aliases=("positive_likelihood_ratio", "lr_plus")),
    ScoreDefinition("lrn", "negative likelihood ratio", _lrn, (_lrn_tp,), (_lrn_tn,), upper=None,
                    aliases=("negative_likelihood_ratio", "lr_minus")),
    ScoreDefinition("pt", "prevalence threshold", _pt, (_pt_tp,), (_pt_tn,), radical=True, aliases=("prevalence_threshold",)),
    ScoreDefinition("dor", "diagnostic odds ratio", _dor, (_dor_tp,), (_dor_tn,), upper=None, aliases=("diagnostic_odds_ratio",)),
    ScoreDefinition("ji", "Jaccard index", _ji, (_ji_tp,), (_ji_tn,), aliases=("jaccard", "jaccard_index", "threat_score", "csi")),
    ScoreDefinition("bacc", "balanced accuracy", _bacc, (_bacc_tp,), (_bacc_tn,), linear_in_tp_tn=True,
                    aliases=("balanced_accuracy",)),
    ScoreDefinition("kappa", "Cohen's kappa", _kappa, (_kappa_tp,), (_kappa_tn,), lower=Fraction(-1),
                    aliases=("cohen_kappa", "cohens_kappa")),
)

# Aliases that also pin a parameter
_PARAMETRIC_ALIASES: dict[str, tuple[str, tuple[tuple[str, Fraction], ...]]] = {
    "f1": ("fbp", (("beta_plus", Fraction(1)),)),
    "f1p": ("fbp", (("beta_plus", Fraction(1)),)),
    "f1_plus": ("fbp", (("beta_plus", Fraction(1)),)),
    "f1_score": ("fbp", (("beta_plus", Fraction(1)),)),
    "f1n": ("fbn", (("beta_minus", Fraction(1)),)),
    "f1_minus": ("fbn", (("beta_minus", Fraction(1)),)),
}


def normalize_name(name: str) -> str:
    return name.strip().lower().replace("-", "_").replace(" ", "_")


@dataclass(frozen=True)
class ScoreRegistry:
    """Immutable lookup of score definitions by id or alias."""

    definitions: tuple[ScoreDefinition, ...]
    _by_id: Mapping[str, ScoreDefinition] = field(init=False, repr=False, compare=False)
    _by_alias: Mapping[str, ResolvedScore] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        by_id: dict[str, ScoreDefinition] = {}
        by_alias: dict[str, ResolvedScore] = {}
        for definition in self.definitions:
            if definition.id in by_id:
                raise ValueError(f"duplicate score id {definition.id!r}")
            by_id[definition.id] = definition
            by_alias[normalize_name(definition.id)] = ResolvedScore(definition)
            for alias in definition.aliases:
                by_alias[normalize_name(alias)] = ResolvedScore(definition)
        for alias, (score_id, overrides) in _PARAMETRIC_ALIASES.items():
            if score_id in by_id:
                by_alias[alias] = ResolvedScore(by_id[score_id], overrides)
        object.__setattr__(self, "_by_id", by_id)
        object.__setattr__(self, "_by_alias", by_alias)

    def with_definition(self, definition: ScoreDefinition) -> ScoreRegistry:
        """Return a new registry that also knows ``definition``."""
        return ScoreRegistry(self.definitions + (definition,))

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(d.id for d in self.definitions)

    def __iter__(self) -> Iterator[ScoreDefinition]:
        return iter(self.definitions)

    def __len__(self) -> int:
        return len(self.definitions)

    def __contains__(self, name: object) -> bool:
        return isinstance(name, str) and normalize_name(name) in self._by_alias

    def get(self, score_id: str) -> ScoreDefinition:
        return self.resolve(score_id).definition

    def resolve(self, name: str) -> ResolvedScore:
        """Resolve an id or alias.

        Raises:
            UnknownScoreError: with the closest known name as suggestion.
        """
        key = normalize_name(name)
        resolved = self._by_alias.get(key)
        if resolved is not None:
            return resolved
        close = difflib.get_close_matches(key, list(self._by_alias), n=1, cutoff=0.6)
        suggestion = f"Did you mean '{self._by_alias[close[0]].definition.id}'?" if close else None
        raise UnknownScoreError(
            message=f"Unknown score '{name}'",
            details={"name": name},
            suggestion=suggestion,
        )


DEFAULT_REGISTRY = ScoreRegistry(_BUILTIN_DEFINITIONS)


def enclose(definition: ScoreDefinition, counts: ConfusionCounts, params: ScoreParams = DEFAULT_PARAMS) -> Interval:
    """An interval enclosing the score of ``counts``: a single point for rational scores.

    Raises:
        UndefinedScoreError: if the score does not exist for this matrix.
    """
    try:
        value = definition.forward(Fraction(counts.tp), Fraction(counts.tn), Fraction(counts.p), Fraction(counts.n), params)
    except ZeroDivisionError:
        value = WHOLE_LINE
    if isinstance(value, WholeLine):
        raise UndefinedScoreError(
            message=f"{definition.id} is undefined for tp={counts.tp}, tn={counts.tn}, p={counts.p}, n={counts.n}",
            details={"score": definition.id, "tp": counts.tp, "tn": counts.tn, "p": counts.p, "n": counts.n},
        )
    if isinstance(value, Interval):
        return value
    return Interval.point(value)


def evaluate(definition: ScoreDefinition, counts: ConfusionCounts, params: ScoreParams = DEFAULT_PARAMS) -> Union[Fraction, float]:
    """Score of a confusion matrix.

    Rational scores are returned exactly as a Fraction. Scores involving a square root are returned as
    the float midpoint of their enclosure.

    Raises:
        UndefinedScoreError: if a denominator vanishes.
    """
    value = enclose(definition, counts, params)
    if definition.radical:
        return float((value.lo + value.hi) / 2)
    return value.lo


def matches(definition: ScoreDefinition, counts: ConfusionCounts, value: Interval, params: ScoreParams = DEFAULT_PARAMS) -> bool:
    """Whether the matrix can produce a score inside ``value`` (False when the score is undefined)."""
    try:
        return enclose(definition, counts, params).overlaps(value)
    except UndefinedScoreError:
        return False


def evaluate_all(
    counts: ConfusionCounts,
    params: ScoreParams = DEFAULT_PARAMS,
    registry: ScoreRegistry = DEFAULT_REGISTRY,
) -> dict[str, Union[Fraction, float]]:
    """Every score defined for ``counts``, by id; undefined scores are left out."""
    values: dict[str, Union[Fraction, float]] = {}
    for definition in registry:
        try:
            values[definition.id] = evaluate(definition, counts, params)
        except UndefinedScoreError:
            logger.debug(f"{definition.id} undefined for {counts}")
    return values


def invert(
    definition: ScoreDefinition,
    value: Interval,
    known: str,
    known_value: int,
    p: int,
    n: int,
    params: ScoreParams = DEFAULT_PARAMS,
) -> Union[IntervalSet, WholeLine]:
    """Real values of the unknown count for which the score can fall in ``value``.

    Args:
        definition: The score.
        value: Interval of admissible score values.
        known: "tp" or "tn", the count whose value is given.
        known_value: Value of the known count.
        p: Number of positives.
        n: Number of negatives.
        params: Score parameters.

    Returns:
        A superset of the solutions for the other count, or WHOLE_LINE when the formulas cannot
        restrict it (a denominator interval contains zero).
    """
    if known == "tp":
        branches = definition.inverse_tn
    elif known == "tn":
        branches = definition.inverse_tp
    else:
        raise ValueError(f"known must be 'tp' or 'tn', got {known!r}")

    clipped = definition.clip(value)
    if clipped is None:
        return EMPTY

    pieces: list[Interval] = []
    for branch in branches:
        try:
            result = branch(clipped, Fraction(known_value), Fraction(p), Fraction(n), params)
        except EmptyDomainError:
            continue
        except ZeroDivisionError:
            return WHOLE_LINE
        if result is None:
            continue
        if isinstance(result, WholeLine):
            return WHOLE_LINE
        pieces.append(result)
    return IntervalSet(pieces)
