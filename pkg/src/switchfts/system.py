"""Switched linear system ``x(t+1) = A_s x(t) + B_s u(t)`` and mode kinds."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from .linalg import DimensionError, Matrix, to_fraction


class ModeKind(str, Enum):
    """Whether feedback may observe the active mode (MD) or not (MI)."""

    MD = "md"
    MI = "mi"

    @classmethod
    def parse(cls, value) -> "ModeKind":
        if isinstance(value, cls):
            return value
        return cls(str(value).lower())


@dataclass(frozen=True)
class SwitchedSystem:
    """``M`` pairs ``(A_j, B_j)`` sharing state dimension ``n`` and input dimension ``m``.

    Modes are indexed from 0 in the library; the CLI and reports print them
    1-based.
    """

    A: tuple[Matrix, ...]
    B: tuple[Matrix, ...]

    def __post_init__(self):
        A = tuple(self.A)
        B = tuple(self.B)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        if not A:
            raise ValueError("a switched system needs at least one mode")
        if len(A) != len(B):
            raise DimensionError(f"{len(A)} A matrices but {len(B)} B matrices")
        n = A[0].nrows
        m = B[0].ncols
        for j, (a, b) in enumerate(zip(A, B)):
            if a.shape != (n, n):
                raise DimensionError(f"A[{j}] has shape {a.shape}, expected {(n, n)}")
            if b.shape != (n, m):
                raise DimensionError(f"B[{j}] has shape {b.shape}, expected {(n, m)}")

    @classmethod
    def from_lists(cls, A: Sequence, B: Sequence) -> "SwitchedSystem":
        """Build from nested lists; a B given as a flat list is one column."""
        As = [Matrix(a) for a in A]
        Bs = []
        for a, b in zip(As, B):
            if b and not isinstance(b[0], (list, tuple)):
                Bs.append(Matrix.column(b))
            elif not b:
                Bs.append(Matrix.zeros(a.nrows, 0))
            else:
                Bs.append(Matrix(b))
        return cls(tuple(As), tuple(Bs))

    @property
    def n(self) -> int:
        return self.A[0].nrows

    @property
    def m(self) -> int:
        return self.B[0].ncols

    @property
    def M(self) -> int:
        return len(self.A)

    def A_bar(self) -> Matrix:
        return Matrix.vstack(*self.A)

    def B_bar(self) -> Matrix:
        return Matrix.vstack(*self.B)

    def closed_loop(self, gains: Sequence[Matrix]) -> tuple[Matrix, ...]:
        """``A_j + B_j K_j`` for each mode; ``gains`` holds one K per mode."""
        if len(gains) != self.M:
            raise DimensionError(f"{len(gains)} gains for {self.M} modes")
        return tuple(a + b @ k for a, b, k in zip(self.A, self.B, gains))

    def scaled(self, rho) -> "SwitchedSystem":
        rho = to_fraction(rho)
        if rho <= 0:
            raise ValueError("rho must be positive")
        return SwitchedSystem(tuple(a.scale(1 / rho) for a in self.A), self.B)
