"""Exact closed-loop simulation and exhaustive switching enumeration.

The exhaustive check is the brute-force oracle the rest of the package is
tested against: it enumerates every switching sequence of a given length and
propagates the standard basis (or a supplied set of initial states) exactly.
By linearity, driving a basis of R^n to zero drives every state to zero.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .linalg import DimensionError, Matrix, to_fraction
from .synthesis import GainSet
from .system import SwitchedSystem

__all__ = [
    "Trajectory",
    "ExhaustiveReport",
    "DecayReport",
    "BudgetExceeded",
    "DEFAULT_BUDGET",
    "step",
    "simulate",
    "exhaustive_fts_check",
    "adversarial_decay",
    "norm_sq",
]

DEFAULT_BUDGET = 10**6

Vector = tuple[Fraction, ...]


class BudgetExceeded(RuntimeError):
    def __init__(self, required: int, budget: int):
        super().__init__(f"enumeration needs {required} sequence-state pairs, budget is {budget}")
        self.required = required
        self.budget = budget


def norm_sq(x: Sequence[Fraction]) -> Fraction:
    return sum((a * a for a in x), Fraction(0))


def _vec(x, n: int) -> Vector:
    v = tuple(to_fraction(a) for a in x)
    if len(v) != n:
        raise DimensionError(f"expected a vector of length {n}, got {len(v)}")
    return v


@dataclass(frozen=True)
class Trajectory:
    x0: Vector
    sigma: tuple[int, ...]
    states: tuple[Vector, ...]
    inputs: tuple[Vector, ...]

    @property
    def steps(self) -> int:
        return len(self.inputs)

    def norms_sq(self) -> list[Fraction]:
        return [norm_sq(x) for x in self.states]


@dataclass(frozen=True)
class ExhaustiveReport:
    horizon: int
    all_reach_zero: bool
    sequences_checked: int
    counterexample: tuple[Vector, tuple[int, ...]] | None = None


@dataclass(frozen=True)
class DecayReport:
    trajectory: Trajectory
    ratios_sq: tuple[Fraction | None, ...]
    rate_approx: float | None


def step(sys: SwitchedSystem, x: Sequence, j: int, u: Sequence) -> Vector:
    """``A_j x + B_j u`` exactly (``j`` is 0-based)."""
    if not 0 <= j < sys.M:
        raise IndexError(f"mode {j} out of range for {sys.M} modes")
    x = _vec(x, sys.n)
    u = _vec(u, sys.m)
    return tuple(a + b for a, b in zip(sys.A[j].apply(x), sys.B[j].apply(u)))


def simulate(
    sys: SwitchedSystem,
    gains: GainSet | None,
    x0: Sequence,
    sigma: Sequence[int],
    T: int | None = None,
    v: Sequence[Sequence] | None = None,
) -> Trajectory:
    """Closed loop ``u(t) = K_{s(t)} x(t) (+ v(t))``; ``gains=None`` means ``u = v`` (or 0)."""
    T = len(sigma) if T is None else T
    if len(sigma) < T:
        raise ValueError(f"switching sequence of length {len(sigma)} shorter than {T} steps")
    x = _vec(x0, sys.n)
    per_mode = gains.per_mode(sys.M) if gains is not None else None
    states = [x]
    inputs = []
    for t in range(T):
        j = sigma[t]
        u = per_mode[j].apply(x) if per_mode is not None else (Fraction(0),) * sys.m
        if v is not None:
            u = tuple(a + b for a, b in zip(u, _vec(v[t], sys.m)))
        x = step(sys, x, j, u)
        inputs.append(u)
        states.append(x)
    return Trajectory(states[0], tuple(sigma[:T]), tuple(states), tuple(inputs))


def _search(closed: Sequence[Matrix], X: Matrix, prefix: tuple[int, ...], depth: int):
    """Depth-first, lexicographic; returns the first (sequence, column) left nonzero."""
    if depth == 0:
        for c in range(X.ncols):
            if any(X[i, c] for i in range(X.nrows)):
                return prefix, c
        return None
    for j, C in enumerate(closed):
        hit = _search(closed, C @ X, prefix + (j,), depth - 1)
        if hit is not None:
            return hit
    return None


def exhaustive_fts_check(
    sys: SwitchedSystem,
    gains: GainSet | None,
    horizon: int,
    initial: Sequence[Sequence] | None = None,
    budget: int = DEFAULT_BUDGET,
    threads: int = 1,
) -> ExhaustiveReport:
    """Do all ``M**horizon`` switching sequences drive every initial state to 0?

    ``initial`` defaults to the standard basis. The counterexample, if any,
    is the lexicographically first failing sequence (modes 0-based) paired
    with the first initial state it fails on; the result does not depend on
    ``threads``.
    """
    n = sys.n
    init = [_vec(x, n) for x in initial] if initial is not None else [
        tuple(Fraction(int(i == k)) for i in range(n)) for k in range(n)
    ]
    required = sys.M**horizon * len(init)
    if required > budget:
        raise BudgetExceeded(required, budget)
    per_mode = gains.per_mode(sys.M) if gains is not None else tuple(
        Matrix.zeros(sys.m, n) for _ in range(sys.M)
    )
    closed = sys.closed_loop(per_mode)
    X = Matrix.from_columns(init, n)

    if horizon == 0 or threads <= 1:
        hit = _search(closed, X, (), horizon)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [
                pool.submit(_search, closed, C @ X, (j,), horizon - 1) for j, C in enumerate(closed)
            ]
            results = [f.result() for f in futures]
        hit = next((r for r in results if r is not None), None)

    if hit is None:
        return ExhaustiveReport(horizon, True, required)
    seq, c = hit
    return ExhaustiveReport(horizon, False, required, (init[c], seq))


def adversarial_decay(
    sys: SwitchedSystem, gains: GainSet | None, x0: Sequence, horizon: int
) -> DecayReport:
    """Greedy adversary: each step picks the mode with the largest successor norm.

    Ties go to the lower mode index. ``rate_approx`` is the geometric-mean
    per-step norm ratio (0.0 once the state hits zero), for display only.
    """
    x = _vec(x0, sys.n)
    per_mode = gains.per_mode(sys.M) if gains is not None else None
    sigma = []
    for _ in range(horizon):
        best_j, best = 0, None
        for j in range(sys.M):
            u = per_mode[j].apply(x) if per_mode is not None else (Fraction(0),) * sys.m
            val = norm_sq(step(sys, x, j, u))
            if best is None or val > best:
                best_j, best = j, val
        sigma.append(best_j)
        u = per_mode[best_j].apply(x) if per_mode is not None else (Fraction(0),) * sys.m
        x = step(sys, x, best_j, u)
    traj = simulate(sys, gains, x0, sigma, horizon)
    nsq = traj.norms_sq()
    ratios = tuple(b / a if a else None for a, b in zip(nsq, nsq[1:]))
    if nsq[0] == 0:
        rate = None
    elif any(r == 0 for r in ratios):
        rate = 0.0
    elif ratios:
        rate = math.exp(sum(0.5 * math.log(float(r)) for r in ratios) / len(ratios))
    else:
        rate = None
    return DecayReport(traj, ratios, rate)
