"""Exact dense linear algebra over the rationals.

Everything here works on :class:`fractions.Fraction` entries, so rank
decisions are exact. Matrices and subspaces are immutable values.

Subspaces are stored in a canonical form: the basis columns, read as rows,
are the nonzero rows of a reduced row-echelon matrix. Two bases span the same
subspace exactly when their canonical forms are identical.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence

__all__ = [
    "Matrix",
    "Subspace",
    "Infeasible",
    "Singular",
    "DimensionError",
    "to_fraction",
    "rref",
    "rank",
    "kernel",
    "image",
    "subspace_sum",
    "subspace_intersect",
    "preimage",
    "solve_particular",
    "extend_to_basis",
    "invert",
    "SOLVE_POLICIES",
]

SOLVE_POLICIES = ("zero_free", "min_norm")


class DimensionError(ValueError):
    """Operands have incompatible shapes."""


class Infeasible(ValueError):
    """The linear system ``A X = B`` has no solution."""


class Singular(ValueError):
    """The matrix is not invertible."""


def to_fraction(value) -> Fraction:
    """Convert ints, Fractions and exact decimal/ratio strings to Fraction.

    Floats are refused: they would smuggle binary rounding into exact code.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not matrix entries")
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if "e" in text.lower():
            raise ValueError(f"scientific notation not accepted: {value!r}")
        return Fraction(text)
    raise TypeError(f"cannot convert {type(value).__name__} to an exact rational")


class Matrix:
    """Immutable dense matrix of Fractions.

    Zero-sized shapes are legal; an ``n x 0`` matrix is the empty basis of
    the zero subspace of R^n.
    """

    __slots__ = ("_rows", "nrows", "ncols")

    def __init__(self, rows: Iterable[Iterable], ncols: int | None = None):
        data = tuple(tuple(to_fraction(x) for x in row) for row in rows)
        if data:
            width = len(data[0])
            if any(len(r) != width for r in data):
                raise DimensionError("ragged rows")
            if ncols is not None and ncols != width:
                raise DimensionError(f"expected {ncols} columns, rows have {width}")
        else:
            width = 0 if ncols is None else ncols
        self._rows = data
        self.nrows = len(data)
        self.ncols = width

    # construction helpers

    @classmethod
    def _raw(cls, rows: tuple, nrows: int, ncols: int) -> "Matrix":
        obj = cls.__new__(cls)
        obj._rows = rows
        obj.nrows = nrows
        obj.ncols = ncols
        return obj

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "Matrix":
        z = Fraction(0)
        return cls._raw(tuple((z,) * ncols for _ in range(nrows)), nrows, ncols)

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        one, z = Fraction(1), Fraction(0)
        return cls._raw(
            tuple(tuple(one if i == j else z for j in range(n)) for i in range(n)), n, n
        )

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], nrows: int) -> "Matrix":
        cols = [tuple(to_fraction(x) for x in c) for c in columns]
        if any(len(c) != nrows for c in cols):
            raise DimensionError("column length does not match row count")
        return cls._raw(tuple(tuple(c[i] for c in cols) for i in range(nrows)), nrows, len(cols))

    @classmethod
    def column(cls, entries: Sequence) -> "Matrix":
        return cls([[x] for x in entries], ncols=1)

    @classmethod
    def hstack(cls, *mats: "Matrix") -> "Matrix":
        if not mats:
            raise ValueError("nothing to stack")
        n = mats[0].nrows
        if any(m.nrows != n for m in mats):
            raise DimensionError("hstack needs equal row counts")
        rows = tuple(sum((m._rows[i] for m in mats), ()) for i in range(n))
        return cls._raw(rows, n, sum(m.ncols for m in mats))

    @classmethod
    def vstack(cls, *mats: "Matrix") -> "Matrix":
        if not mats:
            raise ValueError("nothing to stack")
        c = mats[0].ncols
        if any(m.ncols != c for m in mats):
            raise DimensionError("vstack needs equal column counts")
        rows = sum((m._rows for m in mats), ())
        return cls._raw(rows, len(rows), c)

    @classmethod
    def block_diag(cls, *mats: "Matrix") -> "Matrix":
        nr = sum(m.nrows for m in mats)
        nc = sum(m.ncols for m in mats)
        z = Fraction(0)
        rows = []
        offset = 0
        for m in mats:
            for r in m._rows:
                rows.append((z,) * offset + r + (z,) * (nc - offset - m.ncols))
            offset += m.ncols
        return cls._raw(tuple(rows), nr, nc)

    # access

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    @property
    def rows(self) -> tuple[tuple[Fraction, ...], ...]:
        return self._rows

    def __getitem__(self, idx):
        i, j = idx
        return self._rows[i][j]

    def col(self, j: int) -> tuple[Fraction, ...]:
        return tuple(r[j] for r in self._rows)

    def columns(self) -> list[tuple[Fraction, ...]]:
        return [self.col(j) for j in range(self.ncols)]

    def submatrix(self, rows: slice | range, cols: slice | range) -> "Matrix":
        rr = range(self.nrows)[rows] if isinstance(rows, slice) else rows
        cc = range(self.ncols)[cols] if isinstance(cols, slice) else cols
        return Matrix._raw(
            tuple(tuple(self._rows[i][j] for j in cc) for i in rr), len(rr), len(cc)
        )

    def select_columns(self, idx: Sequence[int]) -> "Matrix":
        return Matrix._raw(tuple(tuple(r[j] for j in idx) for r in self._rows), self.nrows, len(idx))

    @property
    def T(self) -> "Matrix":
        return Matrix._raw(
            tuple(tuple(self._rows[i][j] for i in range(self.nrows)) for j in range(self.ncols)),
            self.ncols,
            self.nrows,
        )

    def is_zero(self) -> bool:
        return all(x == 0 for r in self._rows for x in r)

    def tolist(self) -> list[list[Fraction]]:
        return [list(r) for r in self._rows]

    # arithmetic

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if not isinstance(other, Matrix):
            return NotImplemented
        if self.ncols != other.nrows:
            raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
        cols = other.columns()
        z = Fraction(0)
        rows = tuple(
            tuple(sum((a * b for a, b in zip(r, c) if a and b), z) for c in cols)
            for r in self._rows
        )
        return Matrix._raw(rows, self.nrows, other.ncols)

    def apply(self, v: Sequence[Fraction]) -> tuple[Fraction, ...]:
        """Matrix-vector product on a plain tuple."""
        if len(v) != self.ncols:
            raise DimensionError(f"vector of length {len(v)} for matrix {self.shape}")
        z = Fraction(0)
        return tuple(sum((a * b for a, b in zip(r, v) if a and b), z) for r in self._rows)

    def _check_same(self, other: "Matrix"):
        if self.shape != other.shape:
            raise DimensionError(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check_same(other)
        return Matrix._raw(
            tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self._rows, other._rows)),
            self.nrows,
            self.ncols,
        )

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._check_same(other)
        return Matrix._raw(
            tuple(tuple(a - b for a, b in zip(r, s)) for r, s in zip(self._rows, other._rows)),
            self.nrows,
            self.ncols,
        )

    def __neg__(self) -> "Matrix":
        return Matrix._raw(tuple(tuple(-a for a in r) for r in self._rows), self.nrows, self.ncols)

    def scale(self, c) -> "Matrix":
        c = to_fraction(c)
        return Matrix._raw(tuple(tuple(c * a for a in r) for r in self._rows), self.nrows, self.ncols)

    def frobenius_sq(self) -> Fraction:
        return sum((a * a for r in self._rows for a in r), Fraction(0))

    # value semantics

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and self._rows == other._rows

    def __hash__(self):
        return hash((self.nrows, self.ncols, self._rows))

    def __repr__(self):
        body = ", ".join("[" + ", ".join(str(x) for x in r) + "]" for r in self._rows)
        return f"Matrix([{body}], shape={self.shape})"


def _rref_rows(rows: list[list[Fraction]], ncols: int) -> list[int]:
    """In-place Gauss-Jordan elimination; returns pivot columns."""
    pivots = []
    r = 0
    nrows = len(rows)
    for c in range(ncols):
        if r == nrows:
            break
        piv = next((i for i in range(r, nrows) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        lead = rows[r][c]
        if lead != 1:
            rows[r] = [x / lead for x in rows[r]]
        prow = rows[r]
        for i in range(nrows):
            if i != r:
                f = rows[i][c]
                if f:
                    rows[i] = [a - f * b for a, b in zip(rows[i], prow)]
        pivots.append(c)
        r += 1
    return pivots


def rref(M: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row-echelon form of ``M`` and its pivot columns (ascending)."""
    rows = [list(r) for r in M.rows]
    pivots = _rref_rows(rows, M.ncols)
    return Matrix._raw(tuple(tuple(r) for r in rows), M.nrows, M.ncols), pivots


def rank(M: Matrix) -> int:
    return len(rref(M)[1])


@dataclass(frozen=True)
class Subspace:
    """A linear subspace of Q^n held by its canonical basis (columns)."""

    ambient_dim: int
    basis: Matrix

    def __post_init__(self):
        if self.basis.nrows != self.ambient_dim:
            raise DimensionError("basis rows must equal the ambient dimension")

    @classmethod
    def span(cls, M: Matrix) -> "Subspace":
        """Canonical subspace spanned by the columns of ``M``."""
        R, pivots = rref(M.T)
        rows = R.rows[: len(pivots)]
        return cls(M.nrows, Matrix._raw(rows, len(rows), M.nrows).T)

    @classmethod
    def span_of(cls, vectors: Sequence[Sequence], ambient_dim: int) -> "Subspace":
        return cls.span(Matrix.from_columns(vectors, ambient_dim))

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(n, Matrix.zeros(n, 0))

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls(n, Matrix.identity(n))

    @property
    def dim(self) -> int:
        return self.basis.ncols

    def is_full(self) -> bool:
        return self.dim == self.ambient_dim

    def contains(self, v: Sequence) -> bool:
        v = tuple(to_fraction(x) for x in v)
        if len(v) != self.ambient_dim:
            raise DimensionError("vector length does not match ambient dimension")
        # In canonical form each basis column has a unit pivot at a distinct
        # coordinate, so the only candidate combination is read off directly.
        residual = list(v)
        for q in self.basis.columns():
            p = next(i for i, x in enumerate(q) if x != 0)
            c = residual[p]
            if c:
                residual = [a - c * b for a, b in zip(residual, q)]
        return not any(residual)

    __contains__ = contains

    def contains_columns(self, M: Matrix) -> bool:
        return all(self.contains(c) for c in M.columns())

    def issubset(self, other: "Subspace") -> bool:
        return other.contains_columns(self.basis)

    def vectors(self) -> list[tuple[Fraction, ...]]:
        return self.basis.columns()


def kernel(M: Matrix) -> Subspace:
    """Null space ``{v : M v = 0}`` in ambient dimension ``M.ncols``."""
    R, pivots = rref(M)
    n = M.ncols
    free = [c for c in range(n) if c not in set(pivots)]
    vecs = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for i, p in enumerate(pivots):
            v[p] = -R[i, f]
        vecs.append(v)
    return Subspace.span(Matrix.from_columns(vecs, n))


def image(M: Matrix) -> Subspace:
    """Column space of ``M``."""
    return Subspace.span(M)


def _check_ambient(V: Subspace, W: Subspace):
    if V.ambient_dim != W.ambient_dim:
        raise DimensionError(f"ambient dimensions differ: {V.ambient_dim} vs {W.ambient_dim}")


def subspace_sum(V: Subspace, W: Subspace) -> Subspace:
    _check_ambient(V, W)
    return Subspace.span(Matrix.hstack(V.basis, W.basis))


def subspace_intersect(V: Subspace, W: Subspace) -> Subspace:
    _check_ambient(V, W)
    if V.dim == 0 or W.dim == 0:
        return Subspace.zero(V.ambient_dim)
    # V a = W b  <=>  [V | -W] (a, b) = 0; the intersection is {V a}.
    K = kernel(Matrix.hstack(V.basis, -W.basis))
    coeffs = K.basis.submatrix(slice(0, V.dim), slice(None))
    return Subspace.span(V.basis @ coeffs)


def preimage(A: Matrix, V: Subspace) -> Subspace:
    """``{x : A x in V}``, the x-part of ``kernel([A | -basis(V)])``."""
    if A.nrows != V.ambient_dim:
        raise DimensionError(f"map has {A.nrows} rows, subspace lives in R^{V.ambient_dim}")
    K = kernel(Matrix.hstack(A, -V.basis))
    return Subspace.span(K.basis.submatrix(slice(0, A.ncols), slice(None)))


def solve_particular(A: Matrix, B: Matrix, policy: str = "zero_free") -> Matrix:
    """One exact solution ``X`` of ``A X = B``.

    ``policy="zero_free"`` sets every free variable to zero after RREF;
    ``policy="min_norm"`` returns the least-norm solution column by column,
    which is still rational: ``x = R^T (R R^T)^{-1} c`` on the reduced rows.

    Raises :class:`Infeasible` when some column of ``B`` is not in the
    column space of ``A``.
    """
    if A.nrows != B.nrows:
        raise DimensionError(f"A has {A.nrows} rows, B has {B.nrows}")
    if policy not in SOLVE_POLICIES:
        raise ValueError(f"unknown policy {policy!r}")
    n = A.ncols
    aug = Matrix.hstack(A, B)
    R, pivots = rref(aug)
    if pivots and pivots[-1] >= n:
        raise Infeasible("right-hand side is not in the column space")
    r = len(pivots)
    if policy == "zero_free":
        X = [[Fraction(0)] * B.ncols for _ in range(n)]
        for i, p in enumerate(pivots):
            for k in range(B.ncols):
                X[p][k] = R[i, n + k]
        return Matrix(X, ncols=B.ncols)
    # min_norm: rows of R[:r, :n] span the row space of A.
    Rr = R.submatrix(slice(0, r), slice(0, n))
    C = R.submatrix(slice(0, r), slice(n, n + B.ncols))
    if r == 0:
        return Matrix.zeros(n, B.ncols)
    return Rr.T @ (invert(Rr @ Rr.T) @ C)


def extend_to_basis(V: Subspace) -> Matrix:
    """``[basis(V) | e_i ...]``, completed greedily in index order."""
    n = V.ambient_dim
    cols = V.basis.columns()
    current = V
    for i in range(n):
        if len(cols) == n:
            break
        e = [Fraction(0)] * n
        e[i] = Fraction(1)
        if not current.contains(e):
            cols.append(tuple(e))
            current = Subspace.span(Matrix.from_columns(cols, n))
    return Matrix.from_columns(cols, n)


def invert(M: Matrix) -> Matrix:
    """Exact inverse; raises :class:`Singular` when rank-deficient."""
    if M.nrows != M.ncols:
        raise DimensionError(f"cannot invert non-square {M.shape}")
    n = M.nrows
    R, pivots = rref(Matrix.hstack(M, Matrix.identity(n)))
    if sum(1 for p in pivots if p < n) < n:
        raise Singular("matrix is singular")
    return R.submatrix(slice(None), slice(n, 2 * n))
