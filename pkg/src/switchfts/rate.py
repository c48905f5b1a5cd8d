"""Growth-rate analysis.

A system admits arbitrarily fast stabilization exactly when it is fixed-time
stabilizable, so the verdict here is the ladder verdict. On top of that this
module gives explicit decay constants for fixed-time gains, exact minimal
rates for scalar systems, and a sampled (uncertified) lower-bound estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from .ladder import compute_ladder
from .linalg import Matrix, to_fraction
from .synthesis import GainSet, certify_gains, decide_fts
from .system import ModeKind, SwitchedSystem

__all__ = [
    "NotFts",
    "RateVerdict",
    "AnnihilationWitness",
    "DecayCertificate",
    "LowerBoundEstimate",
    "one_step_annihilation",
    "arbitrarily_fast",
    "decay_certificate",
    "rational_sqrt_upper",
    "scalar_min_rate_mi",
    "scalar_min_rate_md",
    "min_max_residual",
    "lower_bound_rate_mi",
    "scale_system",
]


class NotFts(ValueError):
    """A fixed-time horizon was required but the system has none."""


@dataclass(frozen=True)
class RateVerdict:
    mode_kind: ModeKind
    arbitrarily_fast: bool
    fts_horizon: int | None


@dataclass(frozen=True)
class AnnihilationWitness:
    """``x != 0`` with ``A_j x + B_j u_j = 0`` for all j (one shared u for MI)."""

    x: tuple[Fraction, ...]
    inputs: tuple[tuple[Fraction, ...], ...]


@dataclass(frozen=True)
class DecayCertificate:
    rho: Fraction
    C: Fraction
    mu: Fraction
    horizon: int
    gains: GainSet


@dataclass(frozen=True)
class LowerBoundEstimate:
    alpha_approx: float
    direction_approx: tuple[float, ...]
    samples: int
    seed: int
    certified: bool = False


def one_step_annihilation(sys: SwitchedSystem, mode_kind) -> AnnihilationWitness | None:
    """First vector of ``E_1`` with the inputs that kill it in one step, or None."""
    ladder = compute_ladder(sys, mode_kind)
    if ladder.p == 0:
        return None
    first = ladder.steps[1]
    x = first.Q_prime.col(0)
    inputs = tuple(U.col(0) for U in first.U_prime)
    return AnnihilationWitness(x, inputs)


def arbitrarily_fast(sys: SwitchedSystem, mode_kind, policy: str = "zero_free") -> RateVerdict:
    verdict = decide_fts(sys, mode_kind, policy)
    return RateVerdict(verdict.mode_kind, verdict.is_fts, verdict.horizon)


def rational_sqrt_upper(s: Fraction, digits: int = 6) -> Fraction:
    """A rational ``r >= sqrt(s)``, exact when ``s`` is a rational square."""
    s = to_fraction(s)
    if s < 0:
        raise ValueError("negative input")
    num, den = s.numerator, s.denominator
    rn, rd = math.isqrt(num), math.isqrt(den)
    if rn * rn == num and rd * rd == den:
        return Fraction(rn, rd)
    scale = 10**digits
    # sqrt(num/den) = sqrt(num*den)/den
    root = math.isqrt(num * den * scale * scale)
    return Fraction(root + 1, den * scale)


def decay_certificate(sys: SwitchedSystem, gains: GainSet, rho) -> DecayCertificate:
    """Constants with ``|x(t)| <= C rho^t |x0|`` for the closed loop under ``gains``.

    ``mu`` bounds ``max_j |A_j + B_j K_j|`` via the Frobenius norm (rounded up
    to a rational), ``C' = max(1, mu^(p-1))`` and ``C = C' / min(rho, 1)^p``.
    The gains must pass :func:`certify_gains` on a full-dimensional ladder of
    their mode kind, which is what fixes the horizon ``p``.
    """
    rho = to_fraction(rho)
    if rho <= 0:
        raise ValueError("rho must be positive")
    ladder = compute_ladder(sys, gains.mode_kind)
    if not ladder.fixed_point.is_full():
        raise NotFts(f"system is not fixed-time stabilizable under {gains.mode_kind.value} feedback")
    if not certify_gains(sys, gains, ladder).ok:
        raise ValueError("gains do not satisfy the ladder descent property")
    p = ladder.p
    closed = sys.closed_loop(gains.per_mode(sys.M))
    mu = rational_sqrt_upper(max(C.frobenius_sq() for C in closed))
    C_prime = max(Fraction(1), mu ** (p - 1)) if p > 0 else Fraction(1)
    C = C_prime / min(rho, Fraction(1)) ** p
    return DecayCertificate(rho, C, mu, p, gains)


def _scalar_f(a, b, k) -> Fraction:
    return max(abs(aj + bj * k) for aj, bj in zip(a, b))


def scalar_min_rate_mi(a: Sequence, b: Sequence) -> tuple[Fraction, Fraction]:
    """Exact ``min_k max_j |a_j + b_j k|`` and a minimizer.

    The objective is convex and piecewise linear, so its minimum sits at a
    breakpoint: a zero ``-a_j/b_j`` or a crossing of two branches
    ``a_i + b_i k = +-(a_j + b_j k)``. Zero is added as a candidate so that
    flat minima report ``k = 0`` when possible; remaining ties go to the
    smallest ``|k|`` and then the smaller ``k``.
    """
    a = [to_fraction(x) for x in a]
    b = [to_fraction(x) for x in b]
    if len(a) != len(b) or not a:
        raise ValueError("a and b must be nonempty and of equal length")
    cands = {Fraction(0)}
    for aj, bj in zip(a, b):
        if bj:
            cands.add(-aj / bj)
    for i in range(len(a)):
        for j in range(i + 1, len(a)):
            for s in (1, -1):
                # a_i + b_i k = s (a_j + b_j k)
                db = b[i] - s * b[j]
                if db:
                    cands.add((s * a[j] - a[i]) / db)
    best = min(cands, key=lambda k: (_scalar_f(a, b, k), abs(k), k))
    return _scalar_f(a, b, best), best


def scalar_min_rate_md(a: Sequence, b: Sequence) -> Fraction:
    """Mode-dependent scalar rate: modes with input authority are annihilated."""
    a = [to_fraction(x) for x in a]
    b = [to_fraction(x) for x in b]
    return max((Fraction(0) if bj else abs(aj) for aj, bj in zip(a, b)), default=Fraction(0))


def min_max_residual(sys: SwitchedSystem, x: Sequence[float]) -> tuple[float, np.ndarray]:
    """Numerically evaluate ``min_u max_j |A_j x + B_j u|`` (Euclidean norms).

    Solved in epigraph form ``min s  s.t. s >= |A_j x + B_j u|^2`` with SLSQP.
    Returns the value and the minimizing ``u``.
    """
    A = [np.array(M.tolist(), dtype=float) for M in sys.A]
    B = [np.array(M.tolist(), dtype=float) for M in sys.B]
    x = np.asarray(x, dtype=float)
    ax = [Aj @ x for Aj in A]
    m = sys.m
    if m == 0:
        return float(max(np.linalg.norm(v) for v in ax)), np.zeros(0)

    def sq(j, u):
        r = ax[j] + B[j] @ u
        return r @ r

    # Warm start from the least-squares input over the stacked system.
    u0 = np.linalg.lstsq(np.vstack(B), -np.concatenate(ax), rcond=None)[0]
    s0 = max(sq(j, u0) for j in range(len(A)))
    cons = [
        {
            "type": "ineq",
            "fun": (lambda z, j=j: z[0] - sq(j, z[1:])),
            "jac": (lambda z, j=j: np.concatenate(([1.0], -2 * B[j].T @ (ax[j] + B[j] @ z[1:])))),
        }
        for j in range(len(A))
    ]
    res = minimize(
        lambda z: z[0],
        np.concatenate(([s0], u0)),
        jac=lambda z: np.concatenate(([1.0], np.zeros(m))),
        constraints=cons,
        method="SLSQP",
        options={"ftol": 1e-12, "maxiter": 200},
    )
    u = res.x[1:]
    val = max(sq(j, u) for j in range(len(A)))
    return math.sqrt(max(val, 0.0)), u


def lower_bound_rate_mi(sys: SwitchedSystem, samples: int = 256, seed: int = 0) -> LowerBoundEstimate:
    """Heuristic estimate of ``min_{|x|=1} min_u max_j |A_j x + B_j u|``.

    Samples ``samples`` unit directions from a seeded Gaussian and takes the
    smallest value found. Not a certified bound: sampling can only
    over-estimate the true minimum over the sphere. Apply
    :func:`switchfts.synthesis.reduce_inputs` first so the inner problem is
    well posed.
    """
    rng = np.random.default_rng(seed)
    best, best_x = math.inf, None
    for _ in range(samples):
        x = rng.standard_normal(sys.n)
        nx = np.linalg.norm(x)
        if nx == 0:
            continue
        x /= nx
        val, _ = min_max_residual(sys, x)
        if val < best:
            best, best_x = val, x
    return LowerBoundEstimate(best, tuple(float(v) for v in best_x), samples, seed)


def scale_system(sys: SwitchedSystem, rho) -> SwitchedSystem:
    """``(A_j / rho, B_j)``: rate ``rho`` is attainable iff the scaled system is stabilizable."""
    return sys.scaled(rho)
