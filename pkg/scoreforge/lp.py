"""Exact feasibility of bounded-integer linear systems.

:func:`solve_feasibility` decides whether integers within the variable bounds satisfy every constraint. All
arithmetic is over rationals, so the answer is never the victim of rounding:

1. every constraint is scaled to integer coefficients with coprime gcd, and its bounds are rounded inward
   (an integer combination can only take integer values);
2. variable bounds are tightened by single-row propagation, which also checks that the gcd of the unfixed
   coefficients lets the activity land in the window;
3. variables with identical columns are collapsed into their sum;
4. the variables are split into two halves that share as few rows as possible, each half enumerates its
   distinct partial row activities with interval pruning, and the halves are joined on the shared rows;
5. when that enumeration outgrows its state limit, a depth-first branch-and-bound takes over: the linear
   relaxation is checked with a phase-one simplex over ``Fraction`` using Bland's rule, its rounded point is
   tried, and the most fractional variable is split.

Exhausting the node budget yields :attr:`FeasibilityStatus.INDETERMINATE` rather than a guess.
"""

import logging
import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from itertools import product
from typing import Mapping, Optional, Union

from scoreforge.exceptions import TooLargeError

logger = logging.getLogger(__name__)

DEFAULT_NODE_BUDGET = 10**6
BRUTEFORCE_LIMIT = 10**7
MAX_PROPAGATION_ROUNDS = 50
SPLIT_STATE_LIMIT = 400_000


@dataclass(frozen=True)
class Variable:
    name: str
    lower: int
    upper: int

    def __post_init__(self) -> None:
        if self.lower > self.upper:
            raise ValueError(f"variable {self.name}: lower bound {self.lower} exceeds upper bound {self.upper}")


@dataclass(frozen=True)
class Constraint:
    """lo <= sum(coefficient * variable) <= hi; a None bound is infinite."""

    coefficients: tuple[tuple[str, Fraction], ...]
    lo: Optional[Fraction] = None
    hi: Optional[Fraction] = None
    label: str = ""

    @classmethod
    def of(
        cls,
        coefficients: Mapping[str, Union[int, Fraction]],
        lo: Optional[Union[int, Fraction]] = None,
        hi: Optional[Union[int, Fraction]] = None,
        label: str = "",
    ) -> "Constraint":
        return cls(
            tuple((name, Fraction(value)) for name, value in coefficients.items()),
            None if lo is None else Fraction(lo),
            None if hi is None else Fraction(hi),
            label,
        )

    def activity(self, assignment: Mapping[str, int]) -> Fraction:
        return sum((coefficient * assignment[name] for name, coefficient in self.coefficients), Fraction(0))

    def holds(self, assignment: Mapping[str, int]) -> bool:
        value = self.activity(assignment)
        return (self.lo is None or value >= self.lo) and (self.hi is None or value <= self.hi)


@dataclass(frozen=True)
class LinearSystem:
    variables: tuple[Variable, ...]
    constraints: tuple[Constraint, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "constraints", tuple(self.constraints))
        names = [variable.name for variable in self.variables]
        if len(set(names)) != len(names):
            raise ValueError("variable names must be unique")
        declared = set(names)
        for constraint in self.constraints:
            unknown = [name for name, _ in constraint.coefficients if name not in declared]
            if unknown:
                raise ValueError(f"constraint {constraint.label or constraint} references undeclared variables {unknown}")

    @property
    def names(self) -> list[str]:
        return [variable.name for variable in self.variables]


class FeasibilityStatus(str, Enum):
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"
    INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class FeasibilityResult:
    status: FeasibilityStatus
    assignment: Optional[Mapping[str, int]] = None
    nodes: int = field(default=0, compare=False)

    @property
    def feasible(self) -> bool:
        return self.status is FeasibilityStatus.FEASIBLE


def check_assignment(system: LinearSystem, assignment: Mapping[str, int]) -> bool:
    """Independent exact check of bounds and constraints."""
    for variable in system.variables:
        value = assignment.get(variable.name)
        if value is None or not variable.lower <= value <= variable.upper:
            return False
    return all(constraint.holds(assignment) for constraint in system.constraints)


# A constraint over variable indices with integer coefficients and integer bounds
_Row = tuple[tuple[tuple[int, int], ...], Optional[int], Optional[int]]


def _integral_rows(system: LinearSystem) -> Optional[list[_Row]]:
    """Scale every constraint to coprime integer coefficients and round its bounds inward.

    Returns None when some constraint admits no integer activity at all.
    """
    index = {name: i for i, name in enumerate(system.names)}
    rows: list[_Row] = []
    for constraint in system.constraints:
        merged: dict[int, Fraction] = {}
        for name, coefficient in constraint.coefficients:
            merged[index[name]] = merged.get(index[name], Fraction(0)) + coefficient
        terms = {i: c for i, c in merged.items() if c != 0}
        if not terms:
            if (constraint.lo is not None and constraint.lo > 0) or (constraint.hi is not None and constraint.hi < 0):
                return None
            continue
        scale = math.lcm(*(c.denominator for c in terms.values()))
        integral = {i: int(c * scale) for i, c in terms.items()}
        divisor = math.gcd(*integral.values())
        factor = Fraction(scale, divisor)
        lo = None if constraint.lo is None else math.ceil(constraint.lo * factor)
        hi = None if constraint.hi is None else math.floor(constraint.hi * factor)
        if lo is not None and hi is not None and lo > hi:
            logger.debug(f"Constraint {constraint.label!r} admits no integer activity")
            return None
        rows.append((tuple(sorted((i, c // divisor) for i, c in integral.items())), lo, hi))
    return rows


def _floor_div(a: int, b: int) -> int:
    return a // b


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


def _lattice_meets_window(
    terms: tuple[tuple[int, int], ...], lo: Optional[int], hi: Optional[int], lb: list[int], ub: list[int], min_act: int, max_act: int
) -> bool:
    """The unfixed variables only move the activity in multiples of their gcd; one of those must land in the window."""
    free = [c for i, c in terms if lb[i] < ub[i]]
    step = math.gcd(*free) if free else 0
    if step <= 1:
        return True
    low = min_act if lo is None else max(lo, min_act)
    high = max_act if hi is None else min(hi, max_act)
    # min_act is itself reachable, so the reachable activities are min_act + multiples of step
    return _ceil_div(low - min_act, step) <= _floor_div(high - min_act, step)


def _propagate(rows: list[_Row], lb: list[int], ub: list[int]) -> bool:
    """Tighten bounds in place from each row's activity range; False when a row cannot be met."""
    for _ in range(MAX_PROPAGATION_ROUNDS):
        changed = False
        for terms, lo, hi in rows:
            min_act = sum(c * (lb[i] if c > 0 else ub[i]) for i, c in terms)
            max_act = sum(c * (ub[i] if c > 0 else lb[i]) for i, c in terms)
            if (hi is not None and min_act > hi) or (lo is not None and max_act < lo):
                return False
            if not _lattice_meets_window(terms, lo, hi, lb, ub, min_act, max_act):
                return False
            for i, c in terms:
                own_min = c * (lb[i] if c > 0 else ub[i])
                own_max = c * (ub[i] if c > 0 else lb[i])
                new_lb, new_ub = lb[i], ub[i]
                if hi is not None:
                    room = hi - (min_act - own_min)
                    if c > 0:
                        new_ub = min(new_ub, _floor_div(room, c))
                    else:
                        new_lb = max(new_lb, _ceil_div(room, c))
                if lo is not None:
                    room = lo - (max_act - own_max)
                    if c > 0:
                        new_lb = max(new_lb, _ceil_div(room, c))
                    else:
                        new_ub = min(new_ub, _floor_div(room, c))
                if new_lb > new_ub:
                    return False
                if (new_lb, new_ub) != (lb[i], ub[i]):
                    lb[i], ub[i] = new_lb, new_ub
                    changed = True
                    min_act = sum(cc * (lb[j] if cc > 0 else ub[j]) for j, cc in terms)
                    max_act = sum(cc * (ub[j] if cc > 0 else lb[j]) for j, cc in terms)
        if not changed:
            return True
    return True


def _rows_hold(rows: list[_Row], x: list[int]) -> bool:
    for terms, lo, hi in rows:
        activity = sum(c * x[i] for i, c in terms)
        if (lo is not None and activity < lo) or (hi is not None and activity > hi):
            return False
    return True


def _relaxation(rows: list[_Row], lb: list[int], ub: list[int]) -> Optional[list[Fraction]]:
    """A point of the linear relaxation within the bounds, or None if the relaxation is empty.

    Phase one of the simplex method on y = x - lb: every row becomes an equality with a slack, rows not
    started from a slack get an artificial variable, and the sum of artificials is minimised.
    """
    free = [j for j in range(len(lb)) if ub[j] > lb[j]]
    column = {j: c for c, j in enumerate(free)}
    n_free = len(free)

    # (coefficients over free columns, slack sign or 0 for equality, rhs)
    standard: list[tuple[dict[int, Fraction], int, Fraction]] = []
    for terms, lo, hi in rows:
        shift = sum(c * lb[i] for i, c in terms)
        coeffs = {column[i]: Fraction(c) for i, c in terms if i in column}
        if not coeffs:
            continue
        if lo is not None and lo == hi:
            standard.append((coeffs, 0, Fraction(lo - shift)))
            continue
        if hi is not None:
            standard.append((coeffs, +1, Fraction(hi - shift)))
        if lo is not None:
            standard.append((coeffs, -1, Fraction(lo - shift)))
    for j in free:
        standard.append(({column[j]: Fraction(1)}, +1, Fraction(ub[j] - lb[j])))

    n_slack = sum(1 for _, sign, _ in standard if sign != 0)
    slack_start = n_free
    art_start = n_free + n_slack
    m = len(standard)

    tableau: list[list[Fraction]] = []
    basis: list[int] = []
    artificial_rows: list[int] = []
    slack = slack_start
    n_art = 0
    pending: list[tuple[list[Fraction], int]] = []
    for coeffs, sign, rhs in standard:
        row = [Fraction(0)] * (art_start + 1)
        for c, value in coeffs.items():
            row[c] = value
        slack_column = -1
        if sign != 0:
            row[slack] = Fraction(sign)
            slack_column = slack
            slack += 1
        row[-1] = rhs
        if rhs < 0:
            row = [-value for value in row]
        if slack_column >= 0 and row[slack_column] == 1:
            pending.append((row, slack_column))
        else:
            pending.append((row, -1))
            n_art += 1

    width = art_start + n_art + 1
    art = art_start
    for i, (row, basic) in enumerate(pending):
        full = row[:-1] + [Fraction(0)] * n_art + [row[-1]]
        if basic < 0:
            full[art] = Fraction(1)
            basic = art
            art += 1
            artificial_rows.append(i)
        tableau.append(full)
        basis.append(basic)

    # reduced costs of w = sum of artificials, with -w in the rhs slot
    objective = [Fraction(0)] * width
    for i in artificial_rows:
        for j in range(width):
            if j < art_start or j == width - 1:
                objective[j] -= tableau[i][j]

    while True:
        entering = next((j for j in range(art_start) if objective[j] < 0), None)
        if entering is None:
            break
        leaving = -1
        best: Optional[Fraction] = None
        for i in range(m):
            a = tableau[i][entering]
            if a > 0:
                ratio = tableau[i][-1] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leaving]):
                    best, leaving = ratio, i
        if leaving < 0:
            break
        _pivot(tableau, objective, leaving, entering)
        basis[leaving] = entering

    if objective[-1] != 0:
        return None
    y = [Fraction(0)] * n_free
    for i, basic in enumerate(basis):
        if basic < n_free:
            y[basic] = tableau[i][-1]
    x = [Fraction(value) for value in lb]
    for j, c in column.items():
        x[j] += y[c]
    return x


def _pivot(tableau: list[list[Fraction]], objective: list[Fraction], row: int, col: int) -> None:
    pivot_row = tableau[row]
    pivot = pivot_row[col]
    if pivot != 1:
        pivot_row[:] = [value / pivot for value in pivot_row]
    nonzero = [j for j, value in enumerate(pivot_row) if value != 0]
    for other in (*tableau[:row], *tableau[row + 1:], objective):
        factor = other[col]
        if factor != 0:
            for j in nonzero:
                other[j] -= factor * pivot_row[j]


def _most_fractional(x: list[Fraction]) -> Optional[int]:
    best_index: Optional[int] = None
    best_distance: Optional[Fraction] = None
    for i, value in enumerate(x):
        frac = value - math.floor(value)
        if frac == 0:
            continue
        distance = abs(frac - Fraction(1, 2))
        if best_distance is None or distance < best_distance:
            best_index, best_distance = i, distance
    return best_index


class _Merged:
    """Variables with identical columns collapsed into one variable each.

    Such variables enter every row only through their sum, and a sum of bounded integers takes every integer
    between the sums of the bounds, so the collapsed system has an integer solution exactly when the original does.
    """

    def __init__(self, rows: list[_Row], lb: list[int], ub: list[int]) -> None:
        columns: list[list[tuple[int, int]]] = [[] for _ in lb]
        for r, (terms, _, _) in enumerate(rows):
            for i, c in terms:
                columns[i].append((r, c))
        group_of: dict[tuple[tuple[int, int], ...], int] = {}
        self.members: list[list[int]] = []
        for i, column in enumerate(columns):
            key = tuple(column)
            if key not in group_of:
                group_of[key] = len(self.members)
                self.members.append([])
            self.members[group_of[key]].append(i)
        index = [0] * len(lb)
        for g, group in enumerate(self.members):
            for i in group:
                index[i] = g
        self.rows: list[_Row] = [(tuple(sorted({(index[i], c) for i, c in terms})), lo, hi) for terms, lo, hi in rows]
        self.lb = [sum(lb[i] for i in group) for group in self.members]
        self.ub = [sum(ub[i] for i in group) for group in self.members]
        self._lower = list(lb)
        self._upper = list(ub)

    def expand(self, values: list[int]) -> list[int]:
        x = list(self._lower)
        for group, total in zip(self.members, values):
            remainder = total - sum(self._lower[i] for i in group)
            for i in group:
                step = min(remainder, self._upper[i] - self._lower[i])
                x[i] += step
                remainder -= step
        return x


# state -> (predecessor state, value given to the variable of the layer)
_Layer = dict[tuple[int, ...], tuple[tuple[int, ...], int]]


@dataclass(frozen=True)
class _SplitOutcome:
    decided: bool
    point: Optional[list[int]]
    states: int


def _split_halves(rows: list[_Row], count: int) -> tuple[list[int], list[int]]:
    """Two halves of the variables keeping as many short rows as possible inside one half."""
    parent = list(range(count))
    size = [1] * count

    def root(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    half = (count + 1) // 2
    for terms, _, _ in sorted(rows, key=lambda row: len(row[0])):
        roots = {root(i) for i, _ in terms}
        if len(roots) < 2 or sum(size[r] for r in roots) > half:
            continue
        head, *others = roots
        for other in others:
            parent[other] = head
            size[head] += size[other]
    components: dict[int, list[int]] = {}
    for i in range(count):
        components.setdefault(root(i), []).append(i)
    left: list[int] = []
    right: list[int] = []
    for component in sorted(components.values(), key=len, reverse=True):
        (left if len(left) <= len(right) else right).extend(component)
    return left, right


def _contribution_range(rows: list[_Row], lb: list[int], ub: list[int], half: set[int]) -> tuple[list[int], list[int]]:
    low = [0] * len(rows)
    high = [0] * len(rows)
    for r, (terms, _, _) in enumerate(rows):
        for i, c in terms:
            if i in half:
                low[r] += c * (lb[i] if c > 0 else ub[i])
                high[r] += c * (ub[i] if c > 0 else lb[i])
    return low, high


def _half_layers(
    rows: list[_Row],
    lb: list[int],
    ub: list[int],
    order: list[int],
    outside: tuple[list[int], list[int]],
    limit: int,
) -> Optional[list[_Layer]]:
    """Every distinct vector of partial row activities reachable by the variables of ``order``, layer by layer.

    A value is only tried when each row can still reach its window with what the later variables and the other
    half may add. Rows lying inside the half are verified at their last variable and reset to zero, so states
    differing only in already satisfied rows merge. Returns None when more than ``limit`` states would be kept;
    an empty last layer means no assignment of the half is compatible with the rows.
    """
    position = {v: j for j, v in enumerate(order)}
    columns: dict[int, list[tuple[int, int]]] = {v: [] for v in order}
    closing: list[list[int]] = [[] for _ in order]
    for r, (terms, _, _) in enumerate(rows):
        for i, c in terms:
            if i in position:
                columns[i].append((r, c))
        if all(i in position for i, _ in terms):
            closing[max(position[i] for i, _ in terms)].append(r)

    rest_min = [list(outside[0])]
    rest_max = [list(outside[1])]
    for v in reversed(order):
        mins, maxs = list(rest_min[0]), list(rest_max[0])
        for r, c in columns[v]:
            mins[r] += c * (lb[v] if c > 0 else ub[v])
            maxs[r] += c * (ub[v] if c > 0 else lb[v])
        rest_min.insert(0, mins)
        rest_max.insert(0, maxs)

    start = (0,) * len(rows)
    layers: list[_Layer] = [{start: (start, 0)}]
    kept = 0
    for j, v in enumerate(order):
        after_min, after_max = rest_min[j + 1], rest_max[j + 1]
        column = columns[v]
        layer: _Layer = {}
        for state in layers[-1]:
            low, high = lb[v], ub[v]
            for r, c in column:
                _, lo, hi = rows[r]
                if lo is not None:
                    need = lo - state[r] - after_max[r]
                    if c > 0:
                        low = max(low, _ceil_div(need, c))
                    else:
                        high = min(high, _floor_div(need, c))
                if hi is not None:
                    room = hi - state[r] - after_min[r]
                    if c > 0:
                        high = min(high, _floor_div(room, c))
                    else:
                        low = max(low, _ceil_div(room, c))
            for value in range(low, high + 1):
                successor = list(state)
                for r, c in column:
                    successor[r] += c * value
                for r in closing[j]:
                    successor[r] = 0
                key = tuple(successor)
                if key not in layer:
                    layer[key] = (state, value)
            if kept + len(layer) > limit:
                return None
        kept += len(layer)
        layers.append(layer)
        if not layer:
            break
    return layers


def _within(row: _Row, activity: int) -> bool:
    _, lo, hi = row
    return (lo is None or activity >= lo) and (hi is None or activity <= hi)


def _join(
    rows: list[_Row], coupling: list[int], left: list[tuple[int, ...]], right: list[tuple[int, ...]]
) -> Optional[tuple[tuple[int, ...], tuple[int, ...]]]:
    if not left or not right:
        return None
    if not coupling:
        return left[0], right[0]
    first, others = coupling[0], coupling[1:]
    right = sorted(right, key=lambda state: state[first])
    keys = [state[first] for state in right]
    _, lo, hi = rows[first]
    for u in left:
        begin = 0 if lo is None else bisect_left(keys, lo - u[first])
        end = len(keys) if hi is None else bisect_right(keys, hi - u[first])
        for w in right[begin:end]:
            if all(_within(rows[r], u[r] + w[r]) for r in others):
                return u, w
    return None


def _trace(layers: list[_Layer], order: list[int], state: tuple[int, ...], x: list[int]) -> None:
    for j in range(len(order), 0, -1):
        state, value = layers[j][state]
        x[order[j - 1]] = value


def _split_search(rows: list[_Row], lb: list[int], ub: list[int], limit: int) -> _SplitOutcome:
    """Exact search that enumerates each half of the variables on its own and joins them on the shared rows.

    Mean-score systems split into the tp and the tn counts, tied only by the rows mixing both, so each half
    keeps few distinct partial activities.
    """
    left, right = _split_halves(rows, len(lb))
    left_set, right_set = set(left), set(right)
    orders = [sorted(half, key=lambda i: (ub[i] - lb[i], i)) for half in (left, right)]
    outsides = [_contribution_range(rows, lb, ub, right_set), _contribution_range(rows, lb, ub, left_set)]

    states = 0
    halves: list[list[_Layer]] = []
    for order, outside in zip(orders, outsides):
        layers = _half_layers(rows, lb, ub, order, outside, limit - states)
        if layers is None:
            logger.debug(f"Split search stopped at the limit of {limit} states")
            return _SplitOutcome(False, None, limit)
        states += sum(len(layer) for layer in layers[1:])
        if not layers[-1]:
            return _SplitOutcome(True, None, states)
        halves.append(layers)

    coupling = [r for r, (terms, _, _) in enumerate(rows) if any(i in left_set for i, _ in terms) and any(i in right_set for i, _ in terms)]
    pair = _join(rows, coupling, list(halves[0][-1]), list(halves[1][-1]))
    if pair is None:
        return _SplitOutcome(True, None, states)
    x = list(lb)
    for layers, order, final in zip(halves, orders, pair):
        _trace(layers, order, final, x)
    return _SplitOutcome(True, x, states)


def _branch_and_bound(rows: list[_Row], lb: list[int], ub: list[int], node_budget: int, nodes: int) -> tuple[FeasibilityStatus, Optional[list[int]], int]:
    stack: list[tuple[list[int], list[int]]] = [(list(lb), list(ub))]
    while stack:
        if nodes >= node_budget:
            logger.warning(f"Node budget of {node_budget} exhausted")
            return FeasibilityStatus.INDETERMINATE, None, nodes
        lb, ub = stack.pop()
        nodes += 1
        if not _propagate(rows, lb, ub):
            continue
        if lb == ub:
            if _rows_hold(rows, lb):
                return FeasibilityStatus.FEASIBLE, lb, nodes
            continue
        x = _relaxation(rows, lb, ub)
        if x is None:
            continue
        branch = _most_fractional(x)
        if branch is None:
            return FeasibilityStatus.FEASIBLE, [int(value) for value in x], nodes
        rounded = [min(max(round(value), lb[i]), ub[i]) for i, value in enumerate(x)]
        if _rows_hold(rows, rounded):
            return FeasibilityStatus.FEASIBLE, rounded, nodes

        value = x[branch]
        down_ub = list(ub)
        down_ub[branch] = math.floor(value)
        up_lb = list(lb)
        up_lb[branch] = math.ceil(value)
        down = (list(lb), down_ub)
        up = (up_lb, list(ub))
        # the side nearer to the relaxed value is explored first
        if value - math.floor(value) < Fraction(1, 2):
            stack.extend((up, down))
        else:
            stack.extend((down, up))
    return FeasibilityStatus.INFEASIBLE, None, nodes


def solve_feasibility(system: LinearSystem, node_budget: int = DEFAULT_NODE_BUDGET) -> FeasibilityResult:
    """Decide whether the system has an integer solution.

    Args:
        system: Variables with integer bounds and rational two-sided constraints.
        node_budget: Maximum number of search states and branch-and-bound nodes, together.

    Returns:
        FEASIBLE with an assignment that passes :func:`check_assignment`, INFEASIBLE, or INDETERMINATE
        when the node budget ran out.
    """
    names = system.names
    rows = _integral_rows(system)
    lb = [variable.lower for variable in system.variables]
    ub = [variable.upper for variable in system.variables]
    if rows is None or not _propagate(rows, lb, ub):
        return FeasibilityResult(FeasibilityStatus.INFEASIBLE)
    merged = _Merged(rows, lb, ub)
    if not _propagate(merged.rows, merged.lb, merged.ub):
        return FeasibilityResult(FeasibilityStatus.INFEASIBLE)
    if len(merged.members) < len(lb):
        logger.debug(f"Collapsed {len(lb)} variables with shared columns into {len(merged.members)}")

    split = _split_search(merged.rows, merged.lb, merged.ub, min(node_budget, SPLIT_STATE_LIMIT))
    if split.point is not None:
        return _feasible(system, names, merged.expand(split.point), split.states)
    if split.decided:
        logger.debug(f"Infeasible after {split.states} search state(s)")
        return FeasibilityResult(FeasibilityStatus.INFEASIBLE, nodes=split.states)

    status, point, nodes = _branch_and_bound(merged.rows, merged.lb, merged.ub, node_budget, split.states)
    if point is not None:
        return _feasible(system, names, merged.expand(point), nodes)
    logger.debug(f"{status.value.capitalize()} after {nodes} node(s)")
    return FeasibilityResult(status, nodes=nodes)


def _feasible(system: LinearSystem, names: list[str], x: list[int], nodes: int) -> FeasibilityResult:
    assignment = dict(zip(names, x))
    if not check_assignment(system, assignment):
        raise AssertionError(f"solver produced an assignment violating the system: {assignment}")
    logger.debug(f"Feasible after {nodes} node(s)")
    return FeasibilityResult(FeasibilityStatus.FEASIBLE, assignment, nodes)


def solve_feasibility_bruteforce(system: LinearSystem, limit: int = BRUTEFORCE_LIMIT) -> FeasibilityResult:
    """Try every integer point in the bounding box, in lexicographic order.

    Raises:
        TooLargeError: if the box holds more than ``limit`` points.
    """
    size = math.prod(variable.upper - variable.lower + 1 for variable in system.variables)
    if size > limit:
        raise TooLargeError(
            message=f"exhaustive search over {size} assignments exceeds {limit}",
            details={"assignments": size, "limit": limit},
        )
    index = {name: i for i, name in enumerate(system.names)}
    scaled: list[tuple[list[tuple[int, int]], Optional[Fraction], Optional[Fraction]]] = []
    for constraint in system.constraints:
        scale = math.lcm(*(c.denominator for _, c in constraint.coefficients)) if constraint.coefficients else 1
        terms = [(index[name], int(c * scale)) for name, c in constraint.coefficients]
        scaled.append((
            terms,
            None if constraint.lo is None else constraint.lo * scale,
            None if constraint.hi is None else constraint.hi * scale,
        ))

    ranges = [range(variable.lower, variable.upper + 1) for variable in system.variables]
    for point in product(*ranges):
        for terms, lo, hi in scaled:
            activity = sum(c * point[i] for i, c in terms)
            if (lo is not None and activity < lo) or (hi is not None and activity > hi):
                break
        else:
            return FeasibilityResult(FeasibilityStatus.FEASIBLE, dict(zip(system.names, point)), size)
    return FeasibilityResult(FeasibilityStatus.INFEASIBLE, nodes=size)
