"""Consistency test for scores computed from a single confusion matrix.

For every value of the figure with the smaller domain (tp when p <= n, tn otherwise), the inverse formulas
of the reported scores give the real values the other figure could take; their intersection is scanned for
integers, and each integer candidate is confirmed by evaluating every reported score forward. The search is
exhaustive, so an empty result proves the scores cannot come from the stated test set.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Optional, Union

from scoreforge.exceptions import InputValidationError, TooLargeError
from scoreforge.interval import WHOLE_LINE, Interval, IntervalSet, WholeLine, intersect
from scoreforge.scores import DEFAULT_PARAMS, DEFAULT_REGISTRY, ConfusionCounts, ScoreDefinition, ScoreParams, ScoreRegistry, invert, matches
from scoreforge.utils import parse_decimal

logger = logging.getLogger(__name__)

DEFAULT_WITNESS_CAP = 16
BRUTEFORCE_LIMIT = 10**7


def default_uncertainty(digits: int, eps_mode: str = "floor_ceil") -> Fraction:
    """Uncertainty of a value reported with ``digits`` decimals: 10^-k, or 10^-k/2 when it was rounded."""
    if eps_mode == "floor_ceil":
        return Fraction(1, 10**digits)
    if eps_mode == "round":
        return Fraction(1, 2 * 10**digits)
    raise ValueError(f"unknown eps_mode {eps_mode!r}")


@dataclass(frozen=True)
class ReportedScore:
    """A reported score value with its numerical uncertainty.

    ``params`` pins score parameters for this score only (set when an alias such as f1 was used); None means
    the parameters of the enclosing problem apply.
    """

    id: str
    value: Fraction
    uncertainty: Fraction
    params: Optional[ScoreParams] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "value", Fraction(self.value))
        object.__setattr__(self, "uncertainty", Fraction(self.uncertainty))
        if self.uncertainty <= 0:
            raise InputValidationError(
                message=f"{self.id}: the uncertainty must be positive, got {self.uncertainty}",
                error_code="VAL_RANGE",
                details={"score": self.id},
            )

    @classmethod
    def from_decimal(
        cls,
        name: str,
        text: str,
        eps: Optional[Fraction] = None,
        eps_mode: str = "floor_ceil",
        params: ScoreParams = DEFAULT_PARAMS,
        registry: ScoreRegistry = DEFAULT_REGISTRY,
    ) -> "ReportedScore":
        """Parse a reported decimal such as "0.6801" exactly.

        The score name may be any alias. Without an explicit ``eps`` the uncertainty follows from the
        number of digits written and ``eps_mode``.
        """
        resolved = registry.resolve(name)
        try:
            value, digits = parse_decimal(text)
        except ValueError as e:
            raise InputValidationError(message=f"{name}: {e}", error_code="VAL_FORMAT", details={"score": name}) from e
        uncertainty = Fraction(eps) if eps is not None else default_uncertainty(digits, eps_mode)
        pinned = resolved.params_for(params) if resolved.overrides else None
        return cls(resolved.definition.id, value, uncertainty, pinned)

    @property
    def interval(self) -> Interval:
        return Interval.around(self.value, self.uncertainty)


@dataclass(frozen=True)
class SingleProblem:
    """Class sizes of a test set and the scores reported for one confusion matrix on it."""

    p: int
    n: int
    scores: tuple[ReportedScore, ...]
    params: ScoreParams = DEFAULT_PARAMS
    registry: ScoreRegistry = field(default=DEFAULT_REGISTRY, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "scores", tuple(self.scores))
        if self.p < 1 or self.n < 1:
            raise InputValidationError(
                message=f"the test set needs positives and negatives, got p={self.p}, n={self.n}",
                error_code="VAL_RANGE",
                details={"p": self.p, "n": self.n},
            )
        if not self.scores:
            raise InputValidationError(message="at least one score must be reported", error_code="VAL_RANGE")
        ids = [score.id for score in self.scores]
        duplicates = sorted({score_id for score_id in ids if ids.count(score_id) > 1})
        if duplicates:
            raise InputValidationError(
                message=f"scores reported more than once: {', '.join(duplicates)}",
                error_code="VAL_DUPLICATE",
                details={"scores": duplicates},
                suggestion="Report each score once",
            )

    def constraints(self) -> list[tuple[ScoreDefinition, Interval, ScoreParams]]:
        """(definition, admissible value interval, parameters) for every reported score."""
        return [(self.registry.get(score.id), score.interval, score.params or self.params) for score in self.scores]

    def scaled(self, p: int, n: int) -> "SingleProblem":
        return SingleProblem(p, n, self.scores, self.params, self.registry)


@dataclass(frozen=True)
class Verdict:
    """Outcome of a single-matrix test.

    ``witnesses`` are (tp, tn) pairs in ascending order. An inconsistent verdict carries none: the search
    was exhaustive. ``truncated`` is set when collection stopped at the witness cap.
    """

    witnesses: tuple[tuple[int, int], ...]
    truncated: bool = False

    @property
    def consistent(self) -> bool:
        return bool(self.witnesses)


def _satisfies(constraints: list[tuple[ScoreDefinition, Interval, ScoreParams]], counts: ConfusionCounts) -> bool:
    return all(matches(definition, counts, value, params) for definition, value, params in constraints)


def _candidates(
    constraints: list[tuple[ScoreDefinition, Interval, ScoreParams]],
    known: str,
    alpha: int,
    p: int,
    n: int,
) -> Union[IntervalSet, WholeLine]:
    current: Union[IntervalSet, WholeLine] = WHOLE_LINE
    for definition, value, params in constraints:
        solutions = invert(definition, value, known, alpha, p, n, params)
        if isinstance(solutions, WholeLine):
            continue
        current = solutions if isinstance(current, WholeLine) else intersect(current, solutions)
        if current.is_empty():
            break
    return current


def iter_witnesses(problem: SingleProblem) -> Iterator[tuple[int, int]]:
    """Every (tp, tn) consistent with the problem, lazily, ordered by the smaller-domain figure first."""
    constraints = problem.constraints()
    p, n = problem.p, problem.n
    by_tp = p <= n
    known, domain, other_hi = ("tp", p, n) if by_tp else ("tn", n, p)
    for alpha in range(domain + 1):
        candidates = _candidates(constraints, known, alpha, p, n)
        betas = range(other_hi + 1) if isinstance(candidates, WholeLine) else candidates.integers(0, other_hi)
        for beta in betas:
            tp, tn = (alpha, beta) if by_tp else (beta, alpha)
            if _satisfies(constraints, ConfusionCounts(tp, tn, p, n)):
                yield tp, tn


def _collect(witnesses: Iterator[tuple[int, int]], witness_cap: Optional[int]) -> Verdict:
    found: list[tuple[int, int]] = []
    for witness in witnesses:
        found.append(witness)
        if witness_cap is not None and len(found) >= witness_cap:
            return Verdict(tuple(sorted(found)), truncated=True)
    return Verdict(tuple(sorted(found)))


def test_single(problem: SingleProblem, witness_cap: Optional[int] = DEFAULT_WITNESS_CAP) -> Verdict:
    """Decide whether the reported scores can come from one confusion matrix on (p, n).

    Args:
        problem: The test set and the reported scores.
        witness_cap: Stop after this many witnesses; None enumerates all of them.

    Returns:
        A consistent verdict with witnesses, or an inconsistent one after exhausting the search.
    """
    verdict = _collect(iter_witnesses(problem), witness_cap)
    logger.debug(f"Single-matrix test p={problem.p}, n={problem.n}: {len(verdict.witnesses)} witness(es)")
    return verdict


def test_single_bruteforce(problem: SingleProblem, witness_cap: Optional[int] = DEFAULT_WITNESS_CAP) -> Verdict:
    """Exhaustive check of every (tp, tn) by forward evaluation.

    Raises:
        TooLargeError: if p * n exceeds the exhaustive-search limit.
    """
    if problem.p * problem.n > BRUTEFORCE_LIMIT:
        raise TooLargeError(
            message=f"exhaustive search over p={problem.p}, n={problem.n} exceeds {BRUTEFORCE_LIMIT} matrices",
            details={"p": problem.p, "n": problem.n, "limit": BRUTEFORCE_LIMIT},
        )
    constraints = problem.constraints()

    def candidates() -> Iterator[tuple[int, int]]:
        for tp in range(problem.p + 1):
            for tn in range(problem.n + 1):
                if _satisfies(constraints, ConfusionCounts(tp, tn, problem.p, problem.n)):
                    yield tp, tn

    return _collect(candidates(), witness_cap)


# Library functions named like tests; keep pytest from collecting them when imported into test modules
test_single.__test__ = False  # type: ignore[attr-defined]
test_single_bruteforce.__test__ = False  # type: ignore[attr-defined]
