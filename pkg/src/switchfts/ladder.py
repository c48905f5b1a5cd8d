"""Fixed-time stabilizable subspace ladders.

Starting from ``E_0 = {0}``, each rung ``E_{k+1}`` collects the states that
can be pushed into ``E_k`` in one step whatever the active mode. The
mode-dependent ladder lets the input depend on the mode; the
mode-independent one demands a single input that works for every mode.

Each new rung also records the extension columns ``Q'`` and an input matrix
``U'`` with ``A_j Q' + B_j U' in E_k`` column by column; these are what the
gain synthesis consumes.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

from .linalg import (
    Matrix,
    Subspace,
    kernel,
    solve_particular,
    subspace_intersect,
)
from .system import ModeKind, SwitchedSystem

__all__ = ["LadderStep", "Ladder", "md_ladder", "mi_ladder", "compute_ladder", "fixed_point_dim"]


@dataclass(frozen=True)
class LadderStep:
    """One rung. ``U_prime`` has one matrix per mode (MD) or a single one (MI)."""

    k: int
    E: Subspace
    Q_prime: Matrix
    U_prime: tuple[Matrix, ...]


@dataclass(frozen=True)
class Ladder:
    mode_kind: ModeKind
    system: SwitchedSystem
    steps: tuple[LadderStep, ...]
    p: int
    Q_p: Matrix
    U_p: tuple[Matrix, ...]

    @property
    def fixed_point(self) -> Subspace:
        return self.steps[self.p].E

    @property
    def dims(self) -> list[int]:
        return [s.E.dim for s in self.steps]

    def E(self, k: int) -> Subspace:
        """Rung ``k``; rungs past the fixed point equal ``E_p``."""
        return self.steps[min(k, self.p)].E

    def inputs_for(self, j: int) -> Matrix:
        """``U_p`` for mode ``j`` (the common matrix for an MI ladder)."""
        return self.U_p[0] if self.mode_kind is ModeKind.MI else self.U_p[j]


def _x_part(K: Subspace, n: int) -> Subspace:
    return Subspace.span(K.basis.submatrix(slice(0, n), slice(None)))


def _md_next(sys: SwitchedSystem, Q: Matrix) -> Subspace:
    n = sys.n
    per_mode = [
        _x_part(kernel(Matrix.hstack(A, -B, -Q)), n) for A, B in zip(sys.A, sys.B)
    ]
    return reduce(subspace_intersect, per_mode)


def _mi_next(sys: SwitchedSystem, Q: Matrix) -> Subspace:
    # Unknowns (x, u, y_1..y_M); block row j reads A_j x + B_j u - Q y_j = 0.
    blocks = Matrix.block_diag(*([-Q] * sys.M))
    stacked = Matrix.hstack(sys.A_bar(), sys.B_bar(), blocks)
    return _x_part(kernel(stacked), sys.n)


def _extension(E_next: Subspace, E_prev: Subspace) -> Matrix:
    """Canonical basis columns of ``E_next`` that raise the rank over ``E_prev``."""
    cols = []
    current = E_prev
    for q in E_next.vectors():
        if not current.contains(q):
            cols.append(q)
            current = Subspace.span(Matrix.hstack(current.basis, Matrix.column(q)))
    return Matrix.from_columns(cols, E_next.ambient_dim)


def _inputs(sys: SwitchedSystem, kind: ModeKind, Q: Matrix, Qp: Matrix, policy: str):
    m = sys.m
    if kind is ModeKind.MD:
        out = []
        for A, B in zip(sys.A, sys.B):
            X = solve_particular(Matrix.hstack(-B, Q), A @ Qp, policy)
            U = X.submatrix(slice(0, m), slice(None))
            Y = X.submatrix(slice(m, None), slice(None))
            assert (A @ Qp + B @ U - Q @ Y).is_zero()
            out.append(U)
        return tuple(out)
    lhs = Matrix.hstack(-sys.B_bar(), Matrix.block_diag(*([Q] * sys.M)))
    X = solve_particular(lhs, sys.A_bar() @ Qp, policy)
    U = X.submatrix(slice(0, m), slice(None))
    assert (lhs @ X - sys.A_bar() @ Qp).is_zero()
    return (U,)


def compute_ladder(sys: SwitchedSystem, mode_kind, policy: str = "zero_free") -> Ladder:
    """Run the recursion to its fixed point (at most ``n`` new rungs).

    ``policy`` picks which exact solution of the input equations is kept;
    see :func:`switchfts.linalg.solve_particular`.
    """
    kind = ModeKind.parse(mode_kind)
    n, m = sys.n, sys.m
    n_u = sys.M if kind is ModeKind.MD else 1
    E = Subspace.zero(n)
    Q = Matrix.zeros(n, 0)
    U = tuple(Matrix.zeros(m, 0) for _ in range(n_u))
    steps = [LadderStep(0, E, Q, U)]
    nxt = _md_next if kind is ModeKind.MD else _mi_next
    k = 0
    while True:
        E_next = nxt(sys, Q)
        assert E.issubset(E_next), "ladder must be non-decreasing"
        if E_next == E:
            break
        Qp = _extension(E_next, E)
        assert Qp.ncols > 0
        Up = _inputs(sys, kind, Q, Qp, policy)
        k += 1
        steps.append(LadderStep(k, E_next, Qp, Up))
        Q = Matrix.hstack(Q, Qp)
        U = tuple(Matrix.hstack(u, up) for u, up in zip(U, Up))
        E = E_next
    assert k <= n
    return Ladder(kind, sys, tuple(steps), k, Q, U)


def md_ladder(sys: SwitchedSystem, policy: str = "zero_free") -> Ladder:
    return compute_ladder(sys, ModeKind.MD, policy)


def mi_ladder(sys: SwitchedSystem, policy: str = "zero_free") -> Ladder:
    return compute_ladder(sys, ModeKind.MI, policy)


def fixed_point_dim(ladder: Ladder) -> int:
    return ladder.fixed_point.dim
