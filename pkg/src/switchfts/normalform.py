"""Split a switched system into a fixed-time-stable part and a residual.

After the feedback ``u = K_base x + v`` the fixed point ``E_p`` of the ladder
is invariant under every closed-loop map. Taking coordinates ``x = T z``
whose first ``n_p`` columns span ``E_p`` gives, for every mode,

    T^{-1} (A_j + B_j K_j) T = [[A_yy, A_yxi], [0, A_xixi]],
    T^{-1} B_j               = [[B_y], [B_xi]].

The y-block family is jointly nilpotent, and the residual
``xi+ = A_xixi xi + B_xi v`` has no nontrivial fixed-time stabilizable subspace.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .ladder import compute_ladder
from .linalg import Matrix, extend_to_basis, invert
from .synthesis import GainSet, synthesize
from .system import ModeKind, SwitchedSystem

__all__ = ["NormalForm", "VerifyReport", "decompose", "verify_normal_form", "extract_xi"]


@dataclass(frozen=True)
class NormalForm:
    mode_kind: ModeKind
    system: SwitchedSystem
    n_p: int
    horizon: int
    T: Matrix
    T_inv: Matrix
    K_base: GainSet
    A_yy: tuple[Matrix, ...]
    A_yxi: tuple[Matrix, ...]
    A_xiy: tuple[Matrix, ...]
    A_xixi: tuple[Matrix, ...]
    B_y: tuple[Matrix, ...]
    B_xi: tuple[Matrix, ...]

    @property
    def n(self) -> int:
        return self.system.n

    def block_matrix(self, j: int) -> Matrix:
        """Reassembled ``T^{-1}(A_j + B_j K_j)T``."""
        top = Matrix.hstack(self.A_yy[j], self.A_yxi[j])
        bottom = Matrix.hstack(self.A_xiy[j], self.A_xixi[j])
        return Matrix.vstack(top, bottom)

    def input_matrix(self, j: int) -> Matrix:
        return Matrix.vstack(self.B_y[j], self.B_xi[j])


@dataclass(frozen=True)
class VerifyReport:
    lower_left_zero: bool
    bad_modes: tuple[int, ...]
    y_nilpotent: bool
    products_checked: int
    xi_fixed_point_dim: int

    @property
    def ok(self) -> bool:
        return self.lower_left_zero and self.y_nilpotent and self.xi_fixed_point_dim == 0


def decompose(
    sys: SwitchedSystem,
    mode_kind,
    *,
    transform: Matrix | None = None,
    gains: GainSet | None = None,
    policy: str = "zero_free",
) -> NormalForm:
    """Normal form of ``sys`` for MD or MI feedback.

    By default ``K_base`` is the synthesized gain and ``T`` completes the
    canonical basis of ``E_p`` with standard basis vectors. Both can be
    overridden; the lower-left block is then whatever the data make it, and
    :func:`verify_normal_form` reports on it rather than this function
    raising.
    """
    kind = ModeKind.parse(mode_kind)
    ladder = compute_ladder(sys, kind, policy)
    Ep = ladder.fixed_point
    n_p = Ep.dim
    if gains is None:
        gains = synthesize(ladder) if n_p > 0 else GainSet.zero(sys, kind)
    T = extend_to_basis(Ep) if transform is None else transform
    T_inv = invert(T)
    n = sys.n
    y, xi = slice(0, n_p), slice(n_p, n)
    blocks = {k: [] for k in ("yy", "yxi", "xiy", "xixi", "by", "bxi")}
    for C, B in zip(sys.closed_loop(gains.per_mode(sys.M)), sys.B):
        Z = T_inv @ C @ T
        W = T_inv @ B
        blocks["yy"].append(Z.submatrix(y, y))
        blocks["yxi"].append(Z.submatrix(y, xi))
        blocks["xiy"].append(Z.submatrix(xi, y))
        blocks["xixi"].append(Z.submatrix(xi, xi))
        blocks["by"].append(W.submatrix(y, slice(None)))
        blocks["bxi"].append(W.submatrix(xi, slice(None)))
    return NormalForm(
        kind, sys, n_p, ladder.p, T, T_inv, gains,
        tuple(blocks["yy"]), tuple(blocks["yxi"]), tuple(blocks["xiy"]),
        tuple(blocks["xixi"]), tuple(blocks["by"]), tuple(blocks["bxi"]),
    )


def extract_xi(nf: NormalForm) -> SwitchedSystem:
    """The residual system ``xi+ = A_xixi xi + B_xi v``."""
    return SwitchedSystem(nf.A_xixi, nf.B_xi)


def _jointly_nilpotent(mats: tuple[Matrix, ...], length: int) -> tuple[bool, int]:
    if not mats or mats[0].nrows == 0:
        return True, 0
    n = mats[0].nrows
    count = 0
    ok = True
    for seq in itertools.product(range(len(mats)), repeat=length):
        P = Matrix.identity(n)
        for j in seq:
            P = mats[j] @ P
        count += 1
        if not P.is_zero():
            ok = False
    return ok, count


def verify_normal_form(nf: NormalForm) -> VerifyReport:
    """Check the block structure, y-block joint nilpotency, and the residual ladder.

    Joint nilpotency is tested on every product of length ``nf.horizon``
    (the ladder's fixed-point index) drawn from the y-blocks.
    """
    bad = tuple(j for j, Z in enumerate(nf.A_xiy) if not Z.is_zero())
    if nf.n_p == 0:
        nil, count = True, 0
    else:
        nil, count = _jointly_nilpotent(nf.A_yy, nf.horizon)
    xi_sys = extract_xi(nf)
    xi_dim = compute_ladder(xi_sys, nf.mode_kind).fixed_point.dim if xi_sys.n else 0
    return VerifyReport(not bad, bad, nil, count, xi_dim)
