"""Exact Gaussian-integer scalars and dense matrices.

Everything here runs on Python's arbitrary-precision integers; no operation
ever rounds.  These types back every exact computation in the automaton
engine, so growth of the values is bounded only by memory (callers that want
a guard use the engine's magnitude budget, not this module).
"""

from __future__ import annotations

import operator
from dataclasses import dataclass
from typing import Iterable, Sequence

FLOAT_EXACT_MAX = 2**53


class ShapeError(ValueError):
    """Operand dimensions are incompatible."""


class SymmetryError(ValueError):
    """A matrix violates a required (anti)symmetry; message names the indices."""


class FloatConversionError(ValueError):
    """An integer too large to convert to a float without precision loss."""


def _index(value) -> int:
    # accepts int and int-like values (e.g. gmpy2.mpz); rejects floats
    return operator.index(value)


@dataclass(frozen=True, slots=True)
class GaussianInteger:
    """A complex number with arbitrary-precision integer parts."""

    re: int = 0
    im: int = 0

    def __post_init__(self):
        object.__setattr__(self, "re", _index(self.re))
        object.__setattr__(self, "im", _index(self.im))

    def __add__(self, other: GaussianInteger) -> GaussianInteger:
        other = _try_coerce(other)
        if other is None:
            return NotImplemented
        return GaussianInteger(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other: GaussianInteger) -> GaussianInteger:
        other = _try_coerce(other)
        if other is None:
            return NotImplemented
        return GaussianInteger(self.re - other.re, self.im - other.im)

    def __rsub__(self, other) -> GaussianInteger:
        other = _try_coerce(other)
        if other is None:
            return NotImplemented
        return other.__sub__(self)

    def __mul__(self, other) -> GaussianInteger:
        other = _try_coerce(other)
        if other is None:
            return NotImplemented
        return GaussianInteger(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __neg__(self) -> GaussianInteger:
        return GaussianInteger(-self.re, -self.im)

    def conjugate(self) -> GaussianInteger:
        return GaussianInteger(self.re, -self.im)

    def __bool__(self) -> bool:
        return self.re != 0 or self.im != 0

    def to_complex(self) -> complex:
        """Convert to a float complex; both parts must fit in 53 bits exactly."""
        if abs(self.re) > FLOAT_EXACT_MAX or abs(self.im) > FLOAT_EXACT_MAX:
            raise FloatConversionError(
                f"component magnitude exceeds 2**53; exact value {self!r} "
                "cannot be represented as a float without loss"
            )
        return complex(self.re, self.im)


ZERO = GaussianInteger(0, 0)
ONE = GaussianInteger(1, 0)
I_UNIT = GaussianInteger(0, 1)


def _coerce(value) -> GaussianInteger:
    if isinstance(value, GaussianInteger):
        return value
    return GaussianInteger(_index(value), 0)


def _try_coerce(value) -> GaussianInteger | None:
    if isinstance(value, GaussianInteger):
        return value
    try:
        return GaussianInteger(_index(value), 0)
    except TypeError:
        return None


def _int_rows(rows: Iterable[Iterable[int]], name: str) -> tuple[tuple[int, ...], ...]:
    out = tuple(tuple(_index(v) for v in row) for row in rows)
    if not out:
        raise ShapeError(f"{name} must be non-empty")
    width = len(out[0])
    for i, row in enumerate(out):
        if len(row) != width:
            raise ShapeError(f"{name} row {i} has length {len(row)}, expected {width}")
    return out


@dataclass(frozen=True)
class HamiltonianParts:
    """Integer symmetric S and antisymmetric A, the two halves of H = S + iA."""

    S: tuple[tuple[int, ...], ...]
    A: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        S = _int_rows(self.S, "S")
        A = _int_rows(self.A, "A")
        n = len(S)
        if len(S[0]) != n:
            raise ShapeError(f"S is {n}x{len(S[0])}, expected square")
        if len(A) != n or len(A[0]) != n:
            raise ShapeError(f"A is {len(A)}x{len(A[0])}, expected {n}x{n} to match S")
        for a in range(n):
            for b in range(a, n):
                if S[a][b] != S[b][a]:
                    raise SymmetryError(
                        f"S is not symmetric: S[{a}][{b}]={S[a][b]} != S[{b}][{a}]={S[b][a]}"
                    )
                if A[a][b] != -A[b][a]:
                    raise SymmetryError(
                        f"A is not antisymmetric: A[{a}][{b}]={A[a][b]} != -A[{b}][{a}]={-A[b][a]}"
                    )
        object.__setattr__(self, "S", S)
        object.__setattr__(self, "A", A)

    @property
    def dim(self) -> int:
        return len(self.S)


class GaussianMatrix:
    """Dense row-major matrix of GaussianInteger entries."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries: Sequence):
        rows = _index(rows)
        cols = _index(cols)
        if rows < 1 or cols < 1:
            raise ShapeError(f"matrix dimensions must be positive, got {rows}x{cols}")
        entries = tuple(_coerce(e) for e in entries)
        if len(entries) != rows * cols:
            raise ShapeError(
                f"{rows}x{cols} matrix needs {rows * cols} entries, got {len(entries)}"
            )
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "entries", entries)

    def __setattr__(self, name, value):
        raise AttributeError("GaussianMatrix is immutable")

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable]) -> GaussianMatrix:
        rows = [list(r) for r in rows]
        if not rows:
            raise ShapeError("matrix must have at least one row")
        width = len(rows[0])
        flat = []
        for i, r in enumerate(rows):
            if len(r) != width:
                raise ShapeError(f"row {i} has length {len(r)}, expected {width}")
            flat.extend(r)
        return cls(len(rows), width, flat)

    @classmethod
    def identity(cls, n: int) -> GaussianMatrix:
        return cls(n, n, [ONE if i == j else ZERO for i in range(n) for j in range(n)])

    @classmethod
    def zeros(cls, rows: int, cols: int) -> GaussianMatrix:
        return cls(rows, cols, [ZERO] * (rows * cols))

    def entry(self, i: int, j: int) -> GaussianInteger:
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise ShapeError(f"index ({i},{j}) out of range for {self.rows}x{self.cols}")
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple[GaussianInteger, ...]:
        return self.entries[i * self.cols : (i + 1) * self.cols]

    def _check_same_shape(self, other: GaussianMatrix):
        if self.rows != other.rows or self.cols != other.cols:
            raise ShapeError(
                f"shape mismatch: {self.rows}x{self.cols} vs {other.rows}x{other.cols}"
            )

    def __add__(self, other: GaussianMatrix) -> GaussianMatrix:
        self._check_same_shape(other)
        return GaussianMatrix(
            self.rows, self.cols, [a + b for a, b in zip(self.entries, other.entries)]
        )

    def __sub__(self, other: GaussianMatrix) -> GaussianMatrix:
        self._check_same_shape(other)
        return GaussianMatrix(
            self.rows, self.cols, [a - b for a, b in zip(self.entries, other.entries)]
        )

    def __neg__(self) -> GaussianMatrix:
        return GaussianMatrix(self.rows, self.cols, [-a for a in self.entries])

    def __mul__(self, scalar) -> GaussianMatrix:
        s = _coerce(scalar)
        return GaussianMatrix(self.rows, self.cols, [a * s for a in self.entries])

    __rmul__ = __mul__

    def __matmul__(self, other: GaussianMatrix) -> GaussianMatrix:
        if self.cols != other.rows:
            raise ShapeError(
                f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}"
            )
        out = []
        for i in range(self.rows):
            lrow = self.row(i)
            for j in range(other.cols):
                acc = ZERO
                for k in range(self.cols):
                    acc = acc + lrow[k] * other.entries[k * other.cols + j]
                out.append(acc)
        return GaussianMatrix(self.rows, other.cols, out)

    def conjugate_transpose(self) -> GaussianMatrix:
        out = [
            self.entries[i * self.cols + j].conjugate()
            for j in range(self.cols)
            for i in range(self.rows)
        ]
        return GaussianMatrix(self.cols, self.rows, out)

    def is_zero(self) -> bool:
        return not any(self.entries)

    def is_self_adjoint(self) -> bool:
        if self.rows != self.cols:
            return False
        return self == self.conjugate_transpose()

    def __eq__(self, other) -> bool:
        if not isinstance(other, GaussianMatrix):
            return NotImplemented
        return (
            self.rows == other.rows
            and self.cols == other.cols
            and self.entries == other.entries
        )

    def __hash__(self):
        return hash((self.rows, self.cols, self.entries))

    def __repr__(self):
        return f"GaussianMatrix({self.rows}x{self.cols}, {list(self.entries)!r})"


def build_hamiltonian(parts: HamiltonianParts) -> GaussianMatrix:
    """Assemble the self-adjoint matrix H = S + iA from its integer halves."""
    n = parts.dim
    entries = [
        GaussianInteger(parts.S[a][b], parts.A[a][b]) for a in range(n) for b in range(n)
    ]
    return GaussianMatrix(n, n, entries)


def hamiltonian_parts_of(matrix: GaussianMatrix) -> HamiltonianParts:
    """Split a self-adjoint Gaussian matrix back into (S, A)."""
    if matrix.rows != matrix.cols:
        raise ShapeError(f"matrix is {matrix.rows}x{matrix.cols}, expected square")
    n = matrix.rows
    S = [[matrix.entry(a, b).re for b in range(n)] for a in range(n)]
    A = [[matrix.entry(a, b).im for b in range(n)] for a in range(n)]
    return HamiltonianParts(tuple(map(tuple, S)), tuple(map(tuple, A)))


def commutes(G: GaussianMatrix, H: GaussianMatrix) -> bool:
    """True iff GH - HG is exactly zero.  Integer arithmetic, no tolerance."""
    if G.rows != G.cols or H.rows != H.cols:
        raise ShapeError("commutator requires square matrices")
    if G.rows != H.rows:
        raise ShapeError(f"dimension mismatch: {G.rows} vs {H.rows}")
    return (G @ H - H @ G).is_zero()


def matvec(M: GaussianMatrix, v: Sequence) -> tuple[GaussianInteger, ...]:
    """Exact matrix-vector product."""
    vec = tuple(_coerce(x) for x in v)
    if len(vec) != M.cols:
        raise ShapeError(f"vector length {len(vec)} does not match {M.rows}x{M.cols}")
    out = []
    for i in range(M.rows):
        acc = ZERO
        row = M.row(i)
        for k in range(M.cols):
            acc = acc + row[k] * vec[k]
        out.append(acc)
    return tuple(out)
