"""Feedback gains from ladders, fixed-time verdicts, and gain certification."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .ladder import Ladder, compute_ladder
from .linalg import DimensionError, Matrix, Subspace, invert, rref
from .system import ModeKind, SwitchedSystem

__all__ = [
    "GainSet",
    "FtsVerdict",
    "Violation",
    "CertReport",
    "NoStabilizableSubspace",
    "synthesize",
    "synthesize_md",
    "synthesize_mi",
    "decide_fts",
    "certify_gains",
    "reduce_inputs",
]


class NoStabilizableSubspace(ValueError):
    """The ladder's fixed point is ``{0}``; there is nothing to build a gain on."""


@dataclass(frozen=True)
class GainSet:
    """Linear state feedback: one ``K_j`` per mode (MD) or one shared ``K`` (MI)."""

    mode_kind: ModeKind
    gains: tuple[Matrix, ...]
    source_ladder: Ladder | None = field(default=None, compare=False, repr=False)

    @classmethod
    def mode_dependent(cls, gains: Sequence[Matrix]) -> "GainSet":
        return cls(ModeKind.MD, tuple(gains))

    @classmethod
    def common(cls, K: Matrix) -> "GainSet":
        return cls(ModeKind.MI, (K,))

    @classmethod
    def zero(cls, sys: SwitchedSystem, mode_kind=ModeKind.MI) -> "GainSet":
        kind = ModeKind.parse(mode_kind)
        count = sys.M if kind is ModeKind.MD else 1
        return cls(kind, tuple(Matrix.zeros(sys.m, sys.n) for _ in range(count)))

    def gain_for(self, j: int) -> Matrix:
        return self.gains[0] if self.mode_kind is ModeKind.MI else self.gains[j]

    def per_mode(self, M: int) -> tuple[Matrix, ...]:
        if self.mode_kind is ModeKind.MI:
            return self.gains * M
        if len(self.gains) != M:
            raise DimensionError(f"{len(self.gains)} gains for {M} modes")
        return self.gains


@dataclass(frozen=True)
class FtsVerdict:
    mode_kind: ModeKind
    is_fts: bool
    ladder: Ladder
    horizon: int | None = None
    witness: GainSet | None = None
    blocking_subspace: Subspace | None = None


@dataclass(frozen=True)
class Violation:
    """``(A_j + B_j K_j) q`` left ``E_k`` for column ``column`` of the basis of ``E_{k+1}``."""

    k: int
    mode: int
    column: int


@dataclass(frozen=True)
class CertReport:
    violations: tuple[Violation, ...]
    checks: int

    @property
    def ok(self) -> bool:
        return not self.violations


def synthesize(ladder: Ladder) -> GainSet:
    """``K_j = U_{p,j} (Q_p^T Q_p)^{-1} Q_p^T`` for every mode (one K for MI)."""
    Q = ladder.Q_p
    if Q.ncols == 0:
        raise NoStabilizableSubspace("fixed point of the ladder is {0}")
    pinv = invert(Q.T @ Q) @ Q.T
    gains = tuple(U @ pinv for U in ladder.U_p)
    return GainSet(ladder.mode_kind, gains, ladder)


def synthesize_md(ladder: Ladder) -> GainSet:
    if ladder.mode_kind is not ModeKind.MD:
        raise ValueError("expected a mode-dependent ladder")
    return synthesize(ladder)


def synthesize_mi(ladder: Ladder) -> GainSet:
    if ladder.mode_kind is not ModeKind.MI:
        raise ValueError("expected a mode-independent ladder")
    return synthesize(ladder)


def decide_fts(sys: SwitchedSystem, mode_kind, policy: str = "zero_free") -> FtsVerdict:
    """Fixed-time stabilizable iff the ladder's fixed point is all of R^n.

    Gains are attached whenever the fixed point is nontrivial, so a negative
    verdict still carries the feedback that empties ``E_p``.
    """
    kind = ModeKind.parse(mode_kind)
    ladder = compute_ladder(sys, kind, policy)
    Ep = ladder.fixed_point
    gains = synthesize(ladder) if Ep.dim > 0 else None
    if Ep.is_full():
        return FtsVerdict(kind, True, ladder, horizon=ladder.p, witness=gains)
    return FtsVerdict(kind, False, ladder, witness=gains, blocking_subspace=Ep)


def certify_gains(sys: SwitchedSystem, gains: GainSet, ladder: Ladder) -> CertReport:
    """Check the descent property rung by rung, independently of how gains were built.

    For every ``k < p``, every canonical basis column ``q`` of ``E_{k+1}`` and
    every mode ``j``: ``(A_j + B_j K_j) q`` must lie in ``E_k``. An MI gain
    set uses its single ``K`` for every mode.
    """
    closed = sys.closed_loop(gains.per_mode(sys.M))
    violations = []
    checks = 0
    for k in range(ladder.p):
        target = ladder.E(k)
        for j, C in enumerate(closed):
            for c, q in enumerate(ladder.E(k + 1).vectors()):
                checks += 1
                if not target.contains(C.apply(q)):
                    violations.append(Violation(k, j, c))
    return CertReport(tuple(sorted(violations, key=lambda v: (v.k, v.mode, v.column))), checks)


def reduce_inputs(sys: SwitchedSystem) -> tuple[SwitchedSystem, Matrix]:
    """Drop redundant input directions so the stacked input matrix has full column rank.

    Returns the reduced system and ``T`` (``m x m~``) with ``B~_j = B_j T``.
    ``T`` selects the pivot columns of the stacked ``B``, so it is the
    identity when nothing is redundant.
    """
    _, pivots = rref(sys.B_bar())
    T = Matrix.identity(sys.m).select_columns(pivots)
    return SwitchedSystem(sys.A, tuple(B @ T for B in sys.B)), T
