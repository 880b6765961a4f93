"""Fold structures of k-fold cross-validation experiments.

A fold configuration is the multiset of (positives, negatives) counts of the evaluation sets. This module
infers the configuration stratified folding produces, enumerates every configuration k-fold splitting can
produce when the folding is unknown, and expands a whole experiment (datasets, repetitions) into the
bundles of configurations the mean-of-scores test has to try.
"""

import logging
import math
import warnings
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from itertools import combinations_with_replacement, product
from typing import Iterable, Iterator, Optional, TypeVar

from scoreforge.exceptions import CombinatorialBlowupWarning, InputValidationError

logger = logging.getLogger(__name__)

DEFAULT_BLOWUP_THRESHOLD = 10**7

_T = TypeVar("_T")


@dataclass(frozen=True, order=True)
class Fold:
    """Class counts of one evaluation set."""

    p: int
    n: int

    def __post_init__(self) -> None:
        if self.p < 0 or self.n < 0:
            raise ValueError(f"fold counts must be nonnegative, got p={self.p}, n={self.n}")

    @property
    def size(self) -> int:
        return self.p + self.n


@dataclass(frozen=True)
class FoldConfiguration:
    """A multiset of folds, stored in canonical (sorted) order."""

    folds: tuple[Fold, ...]

    def __post_init__(self) -> None:
        if not self.folds:
            raise ValueError("a fold configuration needs at least one fold")
        object.__setattr__(self, "folds", tuple(sorted(self.folds)))

    @classmethod
    def of(cls, pairs: Iterable[tuple[int, int]]) -> "FoldConfiguration":
        return cls(tuple(Fold(p, n) for p, n in pairs))

    @property
    def p(self) -> int:
        return sum(fold.p for fold in self.folds)

    @property
    def n(self) -> int:
        return sum(fold.n for fold in self.folds)

    def __len__(self) -> int:
        return len(self.folds)

    def __iter__(self) -> Iterator[Fold]:
        return iter(self.folds)

    def pairs(self) -> list[tuple[int, int]]:
        return [(fold.p, fold.n) for fold in self.folds]

    def is_kfold_admissible(self, k: int) -> bool:
        """Whether k-fold splitting can produce this configuration.

        That is: k folds whose sizes differ by at most one, with at least two folds holding positives and
        at least two holding negatives.
        """
        if len(self.folds) != k:
            return False
        size_lo = (self.p + self.n) // k
        if any(fold.size not in (size_lo, size_lo + 1) for fold in self.folds):
            return False
        return _two_of_each(self.folds)

    def satisfies(self, pruning: "FoldPruning") -> bool:
        if pruning.require_positive and any(fold.p == 0 for fold in self.folds):
            return False
        if pruning.require_negative and any(fold.n == 0 for fold in self.folds):
            return False
        return True


class FoldingStrategy(str, Enum):
    EXPLICIT = "explicit"
    STRATIFIED = "stratified"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class FoldPruning:
    """Which classes must appear in every fold; set when a per-fold score needs them (sens, spec)."""

    require_positive: bool = False
    require_negative: bool = False


NO_PRUNING = FoldPruning()


@dataclass(frozen=True)
class Dataset:
    """A dataset of the experiment; ``folds`` is given only under explicit folding."""

    p: int
    n: int
    folds: Optional[FoldConfiguration] = None

    def __post_init__(self) -> None:
        if self.p < 1 or self.n < 1:
            raise InputValidationError(
                message=f"a dataset needs positives and negatives, got p={self.p}, n={self.n}",
                error_code="VAL_RANGE",
                details={"p": self.p, "n": self.n},
            )
        if self.folds is not None and (self.folds.p, self.folds.n) != (self.p, self.n):
            raise InputValidationError(
                message=f"folds sum to p={self.folds.p}, n={self.folds.n}, but the dataset has p={self.p}, n={self.n}",
                error_code="VAL_FOLDS",
                details={"p": self.p, "n": self.n, "folds": self.folds.pairs()},
                suggestion="Check the per-fold counts",
            )


@dataclass(frozen=True)
class ExperimentSpec:
    """Datasets evaluated by (repeated) k-fold cross-validation."""

    datasets: tuple[Dataset, ...]
    k: int
    repeats: int = 1
    folding: FoldingStrategy = FoldingStrategy.UNKNOWN

    def __post_init__(self) -> None:
        object.__setattr__(self, "datasets", tuple(self.datasets))
        object.__setattr__(self, "folding", FoldingStrategy(self.folding))
        if not self.datasets:
            raise InputValidationError(message="an experiment needs at least one dataset", error_code="VAL_RANGE")
        if self.k < 2:
            raise ValueError(f"k must be at least 2, got {self.k}")
        if self.repeats < 1:
            raise ValueError(f"repeats must be at least 1, got {self.repeats}")
        if self.folding is FoldingStrategy.EXPLICIT and any(dataset.folds is None for dataset in self.datasets):
            raise InputValidationError(
                message="explicit folding requires the folds of every dataset",
                error_code="VAL_FOLDS",
                suggestion="List the folds or use the stratified/unknown folding strategy",
            )

    @property
    def totals(self) -> tuple[int, int]:
        """Pooled (p, n) over all datasets and repetitions."""
        return (
            self.repeats * sum(dataset.p for dataset in self.datasets),
            self.repeats * sum(dataset.n for dataset in self.datasets),
        )


# One configuration per dataset and repetition
ConfigurationBundle = tuple[FoldConfiguration, ...]


def bundle_folds(bundle: ConfigurationBundle) -> tuple[Fold, ...]:
    return tuple(fold for configuration in bundle for fold in configuration)


@dataclass
class ExpandedExperiment:
    som: tuple[int, int]
    mos: Iterator[ConfigurationBundle]
    estimated_bundles: int


def _two_of_each(folds: Iterable[Fold]) -> bool:
    folds = list(folds)
    return sum(1 for fold in folds if fold.p > 0) >= 2 and sum(1 for fold in folds if fold.n > 0) >= 2


def _m_partitions(q: int, m: int) -> Iterator[tuple[int, ...]]:
    """Partitions of q into exactly m positive parts, each in non-increasing order.

    Knuth's Algorithm H: the first part is moved down while the second moves up; when that is no longer
    possible the leading parts are rebalanced from the first position that can still grow.
    """
    if m < 1 or q < m:
        return
    if m == 1:
        yield (q,)
        return
    a = [q - m + 1] + [1] * (m - 1) + [-1]
    while True:
        yield tuple(a[:m])
        if a[1] < a[0] - 1:
            a[0] -= 1
            a[1] += 1
            continue
        j = 2
        s = a[0] + a[1] - 1
        while a[j] >= a[0] - 1:
            s += a[j]
            j += 1
        if j >= m:
            return
        x = a[j] + 1
        a[j] = x
        j -= 1
        while j > 0:
            a[j] = x
            s -= x
            j -= 1
        a[0] = s


def partitions(q: int, m: int, cap: int) -> Iterator[tuple[int, ...]]:
    """Partitions of q into at most m parts, none greater than cap, zero-padded to length m.

    Parts are listed in non-decreasing order; the partitions are ordered by their number of parts, then
    by the order of :func:`_m_partitions`.
    """
    if q < 0 or m < 0 or cap < 0:
        raise ValueError(f"invalid partition request q={q}, m={m}, cap={cap}")
    if q == 0:
        yield (0,) * m
        return
    for parts in range(1, min(q, m) + 1):
        for partition in _m_partitions(q, parts):
            if partition[0] <= cap:
                yield (0,) * (m - parts) + tuple(reversed(partition))


def _fold_partitions(q: int, m: int, size: int, pruning: FoldPruning) -> Iterator[tuple[int, ...]]:
    """Positives of m folds of ``size`` samples summing to q, honoring the pruning."""
    if m == 0:
        if q == 0:
            yield ()
        return
    cap = size - 1 if pruning.require_negative else size
    if cap < 0:
        return
    if not pruning.require_positive:
        yield from partitions(q, m, cap)
        return
    for partition in _m_partitions(q, m):
        if partition[0] <= cap:
            yield tuple(reversed(partition))


def _fold_sizes(p: int, n: int, k: int) -> tuple[int, int, int, int]:
    """(k_a, c_a, k_b, c_b): k_a folds of c_a samples and k_b folds of c_b samples."""
    if k < 2:
        raise ValueError(f"k must be at least 2, got {k}")
    k_div, k_mod = divmod(p + n, k)
    return k_mod, k_div + 1, k - k_mod, k_div


def enumerate_configurations(p: int, n: int, k: int, pruning: FoldPruning = NO_PRUNING) -> Iterator[FoldConfiguration]:
    """Every fold configuration k-fold splitting of (p, n) can produce, each exactly once.

    With N = p + n, there are (N mod k) folds of N//k + 1 samples and the rest have N//k samples. The
    positives of the larger folds (p_a) run from 0 upwards; for each p_a the partitions of p_a over the
    larger folds are crossed with those of p - p_a over the smaller ones. Configurations with fewer than two
    folds holding each class are skipped, as are those the pruning rules out.
    """
    if p + n < k:
        return
    k_a, c_a, k_b, c_b = _fold_sizes(p, n, k)
    for p_a in range(min(p, k_a * c_a) + 1):
        p_b = p - p_a
        if p_b > k_b * c_b:
            continue
        parts_b = list(_fold_partitions(p_b, k_b, c_b, pruning))
        if not parts_b:
            continue
        for part_a in _fold_partitions(p_a, k_a, c_a, pruning):
            folds_a = [Fold(x, c_a - x) for x in part_a]
            for part_b in parts_b:
                folds = folds_a + [Fold(x, c_b - x) for x in part_b]
                if _two_of_each(folds):
                    yield FoldConfiguration(tuple(folds))


def count_configurations(p: int, n: int, k: int, pruning: FoldPruning = NO_PRUNING) -> int:
    return sum(1 for _ in enumerate_configurations(p, n, k, pruning))


@lru_cache(maxsize=64)
def _box_counts(m: int, cap: int, q_max: int) -> tuple[int, ...]:
    """Number of partitions of q into at most m parts, none greater than cap, for q = 0..q_max.

    These are the coefficients of the Gaussian binomial prod_{i=1..m} (1 - x^(cap+i)) / (1 - x^i).
    """
    coeffs = [1] + [0] * q_max
    if cap <= 0:
        return tuple(coeffs)
    for i in range(1, m + 1):
        shift = cap + i
        for d in range(q_max, shift - 1, -1):
            coeffs[d] -= coeffs[d - shift]
        for d in range(i, q_max + 1):
            coeffs[d] += coeffs[d - i]
    return tuple(coeffs)


def _count_fold_partitions(m: int, size: int, pruning: FoldPruning, q_max: int) -> list[int]:
    """Counts of :func:`_fold_partitions` results for q = 0..q_max."""
    counts = [0] * (q_max + 1)
    if m == 0:
        counts[0] = 1
        return counts
    cap = size - 1 if pruning.require_negative else size
    if cap < 0:
        return counts
    if not pruning.require_positive:
        return list(_box_counts(m, cap, q_max))
    if cap < 1:
        return counts
    # exactly m parts in [1, cap]: subtract one from every part
    shifted = _box_counts(m, cap - 1, q_max)
    for q in range(m, q_max + 1):
        counts[q] = shifted[q - m]
    return counts


def estimate_configurations(p: int, n: int, k: int, pruning: FoldPruning = NO_PRUNING) -> int:
    """Upper bound on :func:`count_configurations` without enumerating (ignores the two-folds-per-class rule)."""
    if p + n < k:
        return 0
    k_a, c_a, k_b, c_b = _fold_sizes(p, n, k)
    counts_a = _count_fold_partitions(k_a, c_a, pruning, p)
    counts_b = _count_fold_partitions(k_b, c_b, pruning, p)
    return sum(counts_a[p_a] * counts_b[p - p_a] for p_a in range(min(p, k_a * c_a) + 1))


def stratified_configuration(p: int, n: int, k: int) -> FoldConfiguration:
    """The configuration of stratified k-fold splitting: per-class counts differ by at most one across folds."""
    if k < 2:
        raise ValueError(f"k must be at least 2, got {k}")
    if p + n < k:
        raise ValueError(f"cannot split {p + n} samples into {k} folds")
    p_div, p_mod = divmod(p, k)
    n_div, n_mod = divmod(n, k)
    if p_mod + n_mod > k:
        rows = [
            (p_mod + n_mod - k, p_div + 1, n_div + 1),
            (k - n_mod, p_div + 1, n_div),
            (k - p_mod, p_div, n_div + 1),
        ]
    else:
        rows = [
            (k - p_mod - n_mod, p_div, n_div),
            (p_mod, p_div + 1, n_div),
            (n_mod, p_div, n_div + 1),
        ]
    return FoldConfiguration(tuple(Fold(fold_p, fold_n) for count, fold_p, fold_n in rows for _ in range(count)))


def _dataset_configurations(spec: ExperimentSpec, dataset: Dataset, pruning: FoldPruning) -> Iterator[FoldConfiguration]:
    if spec.folding is FoldingStrategy.EXPLICIT:
        assert dataset.folds is not None
        yield dataset.folds
    elif spec.folding is FoldingStrategy.STRATIFIED:
        yield stratified_configuration(dataset.p, dataset.n, spec.k)
    else:
        yield from enumerate_configurations(dataset.p, dataset.n, spec.k, pruning)


def _estimate_bundles(spec: ExperimentSpec, pruning: FoldPruning) -> int:
    if spec.folding is not FoldingStrategy.UNKNOWN:
        return 1
    estimate = 1
    for dataset in spec.datasets:
        per_dataset = estimate_configurations(dataset.p, dataset.n, spec.k, pruning)
        # repetitions are an unordered choice of configurations
        estimate *= math.comb(per_dataset + spec.repeats - 1, spec.repeats) if per_dataset else 0
    return estimate


def _multisets(source: Iterator[_T], size: int) -> Iterator[tuple[_T, ...]]:
    """Multisets of ``size`` items of ``source``, yielded while the source is still being read.

    A multiset is yielded right after its last-drawn item, combined with items drawn before it, so each one
    appears once and nothing beyond the drawn items is held.
    """
    drawn: list[_T] = []
    for item in source:
        for copies in range(size, 0, -1):
            for rest in combinations_with_replacement(range(len(drawn)), size - copies):
                yield tuple(drawn[i] for i in rest) + (item,) * copies
        drawn.append(item)


def _interleaved_product(sources: list[Iterator[_T]]) -> Iterator[tuple[_T, ...]]:
    """The cartesian product of lazy sources, drawing from them in turn."""
    drawn: list[list[_T]] = [[] for _ in sources]
    active = list(range(len(sources)))
    while active:
        for d in list(active):
            item = next(sources[d], None)
            if item is None:
                if not drawn[d]:
                    return
                active.remove(d)
                continue
            yield from product(*[[item] if e == d else drawn[e] for e in range(len(sources))])
            drawn[d].append(item)


def _unknown_bundles(spec: ExperimentSpec, pruning: FoldPruning) -> Iterator[ConfigurationBundle]:
    per_dataset = [
        _multisets(enumerate_configurations(dataset.p, dataset.n, spec.k, pruning), spec.repeats)
        for dataset in spec.datasets
    ]
    for choice in _interleaved_product(per_dataset):
        yield tuple(configuration for repetitions in choice for configuration in repetitions)


def expand_experiment(
    spec: ExperimentSpec,
    pruning: FoldPruning = NO_PRUNING,
    blowup_threshold: int = DEFAULT_BLOWUP_THRESHOLD,
) -> ExpandedExperiment:
    """Reduce an experiment to what the two aggregation tests need.

    Returns:
        The pooled totals for the score-of-means test, and a lazy stream of configuration bundles (one
        configuration per dataset and repetition) for the mean-of-scores test.

    Warns:
        CombinatorialBlowupWarning: if the estimated number of bundles exceeds ``blowup_threshold``.
    """
    estimated = _estimate_bundles(spec, pruning)
    if estimated > blowup_threshold:
        message = f"about {estimated} fold-configuration bundles to test (threshold {blowup_threshold})"
        logger.warning(message)
        warnings.warn(message, CombinatorialBlowupWarning, stacklevel=2)

    if spec.folding is FoldingStrategy.UNKNOWN:
        bundles: Iterator[ConfigurationBundle] = _unknown_bundles(spec, pruning)
    else:
        bundle = tuple(
            configuration
            for dataset in spec.datasets
            for configuration in _dataset_configurations(spec, dataset, pruning)
            for _ in range(spec.repeats)
        )
        bundles = iter([bundle])
    return ExpandedExperiment(som=spec.totals, mos=bundles, estimated_bundles=estimated)
