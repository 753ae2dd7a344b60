"""Matrices with Laurent-polynomial entries on the unit circle.

The coefficient table is dense over a finite band [min_pow, max_pow];
products are exact entrywise convolutions, and the boundary adjoint is
transpose + conjugate + index negation.  Inner-ness and analyticity are
decided per coefficient against explicit tolerances, and the analyticity
check always reports the largest offending magnitude so that a FAIL
verdict carries its own evidence.

Inputs are restricted to finite-band matrices; scalar disc-automorphism
factors must be pre-expanded to a stated Taylor degree before being placed
in a matrix entry (the expansion tail bound is the caller's to track).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import BudgetExceeded, DimensionMismatch, NotAnalytic, ParamOutOfRange
from .series import TaylorPoly
from .tolerances import ANALYTICITY_TOL
from .veclift import VectorPoly

__all__ = [
    "LaurentMatrix",
    "AnalyticityCheck",
    "build_sigma",
    "adjoint_on_circle",
    "matmul",
    "is_analytic",
    "is_inner",
    "apply_matrix",
    "toeplitz_adjoint_apply",
    "allclose",
    "identity",
    "from_poly_grid",
    "diag_polys",
    "eval_at",
]


@dataclass(frozen=True, eq=False)
class LaurentMatrix:
    """rows x cols matrix; table[i, j, t] is the coefficient of z^(min_pow+t)."""

    rows: int
    cols: int
    min_pow: int
    table: np.ndarray

    def __post_init__(self) -> None:
        tab = np.asarray(self.table, dtype=np.complex128)
        if tab.shape[:2] != (self.rows, self.cols) or tab.ndim != 3:
            raise DimensionMismatch("table shape does not match declared rows/cols")
        # Trim all-zero slices at both band ends so min_pow/max_pow are tight.
        lo, hi = 0, tab.shape[2]
        while hi - lo > 1 and not np.any(tab[:, :, lo]):
            lo += 1
        while hi - lo > 1 and not np.any(tab[:, :, hi - 1]):
            hi -= 1
        tab = tab[:, :, lo:hi].copy()
        tab.flags.writeable = False
        object.__setattr__(self, "table", tab)
        object.__setattr__(self, "min_pow", self.min_pow + lo)

    @property
    def max_pow(self) -> int:
        return self.min_pow + self.table.shape[2] - 1

    def entry(self, i: int, j: int) -> tuple[int, np.ndarray]:
        """(min_pow, coefficient slice) of a single entry."""
        return self.min_pow, self.table[i, j]

    def entry_poly(self, i: int, j: int, cap: int) -> TaylorPoly:
        """Analytic entry as a TaylorPoly; raises if it has negative mass."""
        lo, coefs = self.entry(i, j)
        if lo < 0:
            if np.any(coefs[: -lo] != 0):
                raise NotAnalytic(f"entry ({i},{j}) has negative-index coefficients")
            coefs = coefs[-lo:]
            lo = 0
        arr = np.zeros(lo + coefs.size, dtype=np.complex128)
        arr[lo:] = coefs
        return TaylorPoly(arr, cap)

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return (
            f"LaurentMatrix({self.rows}x{self.cols}, "
            f"pows [{self.min_pow}, {self.max_pow}])"
        )


class AnalyticityCheck(NamedTuple):
    ok: bool
    witness: float
    location: tuple | None  # (row, col, power) of the largest negative term


def from_poly_grid(entries: Sequence[Sequence[Sequence[complex]]],
                   min_pow: int = 0) -> LaurentMatrix:
    """Build from nested lists: entries[i][j] = coefficients from z^min_pow up."""
    rows = len(entries)
    if rows == 0:
        raise DimensionMismatch("matrix needs at least one row")
    cols = len(entries[0])
    if cols == 0 or any(len(r) != cols for r in entries):
        raise DimensionMismatch("ragged entry grid")
    width = max(1, max(len(e) for row in entries for e in row))
    tab = np.zeros((rows, cols, width), dtype=np.complex128)
    for i, row in enumerate(entries):
        for j, e in enumerate(row):
            arr = np.asarray(e, dtype=np.complex128)
            tab[i, j, : arr.size] = arr
    return LaurentMatrix(rows, cols, min_pow, tab)


def diag_polys(polys: Sequence[Sequence[complex]]) -> LaurentMatrix:
    n = len(polys)
    grid = [[[0.0] for _ in range(n)] for _ in range(n)]
    for i, p in enumerate(polys):
        grid[i][i] = list(p)
    return from_poly_grid(grid)


def identity(n: int) -> LaurentMatrix:
    tab = np.zeros((n, n, 1), dtype=np.complex128)
    tab[np.arange(n), np.arange(n), 0] = 1.0
    return LaurentMatrix(n, n, 0, tab)


def build_sigma(m: int, gamma: int, k: int) -> LaurentMatrix:
    """Block shift matrix: z^(k+1) I on the top-right gamma block, z^k I on
    the bottom-left (m-gamma) block, zero elsewhere.

    Under the arity-m lift it realises multiplication by z^(k*m+gamma).
    """
    if m < 2:
        raise ParamOutOfRange(f"m must be >= 2, got {m}")
    if not 1 <= gamma <= m - 1:
        raise ParamOutOfRange(f"gamma must be in 1..{m - 1}, got {gamma}")
    if k < 1:
        raise ParamOutOfRange(f"k must be >= 1, got {k}")
    tab = np.zeros((m, m, k + 2), dtype=np.complex128)
    for i in range(gamma):
        tab[i, m - gamma + i, k + 1] = 1.0
    for i in range(m - gamma):
        tab[gamma + i, i, k] = 1.0
    return LaurentMatrix(m, m, 0, tab)


def adjoint_on_circle(A: LaurentMatrix) -> LaurentMatrix:
    """Boundary adjoint: transpose, conjugate coefficients, negate powers."""
    tab = np.conj(A.table[:, :, ::-1]).transpose(1, 0, 2)
    return LaurentMatrix(A.cols, A.rows, -A.max_pow, tab)


def matmul(A: LaurentMatrix, B: LaurentMatrix) -> LaurentMatrix:
    """Exact product: entrywise Laurent convolution over the inner index."""
    if A.cols != B.rows:
        raise DimensionMismatch(
            f"inner dimensions differ: {A.rows}x{A.cols} times {B.rows}x{B.cols}"
        )
    wa, wb = A.table.shape[2], B.table.shape[2]
    width = wa + wb - 1
    tab = np.zeros((A.rows, B.cols, width), dtype=np.complex128)
    for i in range(A.rows):
        for j in range(B.cols):
            acc = np.zeros(width, dtype=np.complex128)
            for t in range(A.cols):
                a = A.table[i, t]
                b = B.table[t, j]
                if np.any(a) and np.any(b):
                    acc += np.convolve(a, b)
            tab[i, j] = acc
    return LaurentMatrix(A.rows, B.cols, A.min_pow + B.min_pow, tab)


def is_analytic(A: LaurentMatrix, tol: float = ANALYTICITY_TOL) -> AnalyticityCheck:
    """True iff every coefficient at a negative power has magnitude <= tol.

    Always reports the largest negative-power magnitude and its location;
    falsification evidence matters as much as verification.
    """
    if A.min_pow >= 0:
        return AnalyticityCheck(True, 0.0, None)
    neg = min(-A.min_pow, A.table.shape[2])
    block = np.abs(A.table[:, :, :neg])
    flat = int(np.argmax(block))
    i, j, t = np.unravel_index(flat, block.shape)
    witness = float(block[i, j, t])
    if witness == 0.0:
        return AnalyticityCheck(True, 0.0, None)
    return AnalyticityCheck(witness <= tol, witness, (int(i), int(j), A.min_pow + int(t)))


def _require_analytic(A: LaurentMatrix, tol: float, what: str) -> None:
    chk = is_analytic(A, tol)
    if not chk.ok:
        raise NotAnalytic(
            f"{what} has negative-index coefficient of magnitude {chk.witness:.3e} "
            f"at entry {chk.location}"
        )


def is_inner(theta: LaurentMatrix, tol: float = ANALYTICITY_TOL) -> bool:
    """Theta* Theta == identity as a Laurent series, within tol per coefficient."""
    _require_analytic(theta, tol, "inner candidate")
    prod = matmul(adjoint_on_circle(theta), theta)
    ident = identity(theta.cols)
    return allclose(prod, ident, tol)


def allclose(A: LaurentMatrix, B: LaurentMatrix, tol: float = 0.0) -> bool:
    if (A.rows, A.cols) != (B.rows, B.cols):
        return False
    lo = min(A.min_pow, B.min_pow)
    hi = max(A.max_pow, B.max_pow)
    width = hi - lo + 1
    ta = np.zeros((A.rows, A.cols, width), dtype=np.complex128)
    tb = np.zeros_like(ta)
    ta[:, :, A.min_pow - lo: A.min_pow - lo + A.table.shape[2]] = A.table
    tb[:, :, B.min_pow - lo: B.min_pow - lo + B.table.shape[2]] = B.table
    return bool(np.all(np.abs(ta - tb) <= tol))


def apply_matrix(A: LaurentMatrix, F: VectorPoly,
                 tol: float = ANALYTICITY_TOL) -> VectorPoly:
    """Componentwise convolution action of an analytic matrix on a vector
    element; isometric whenever A is inner."""
    _require_analytic(A, tol, "matrix operand")
    if A.cols != F.m:
        raise DimensionMismatch(
            f"matrix has {A.cols} columns but the vector has arity {F.m}"
        )
    cap = F.cap
    drop = max(0, -A.min_pow)  # tolerated sub-threshold negative slices
    comps = []
    for i in range(A.rows):
        acc = np.zeros(1, dtype=np.complex128)
        for j in range(F.m):
            a = A.table[i, j, drop:]
            fj = F.components[j]
            if not np.any(a) or fj.is_zero():
                continue
            entry_lo = A.min_pow + drop
            seg = np.convolve(a, fj.coeffs[: fj.deg() + 1])
            top = entry_lo + seg.size - 1
            if top > cap:
                # Exact top degree check: trailing zero convolution tails allowed.
                nz = np.flatnonzero(seg)
                if nz.size and entry_lo + int(nz[-1]) > cap:
                    raise BudgetExceeded(
                        f"matrix action needs degree {entry_lo + int(nz[-1])} > cap {cap}"
                    )
                seg = seg[: cap - entry_lo + 1]
            term = np.zeros(entry_lo + seg.size, dtype=np.complex128)
            term[entry_lo:] = seg
            if term.size > acc.size:
                term[: acc.size] += acc
                acc = term
            else:
                acc = acc.copy()
                acc[: term.size] += term
        comps.append(TaylorPoly(acc, cap))
    return VectorPoly(tuple(comps))


def toeplitz_adjoint_apply(A: LaurentMatrix, F: VectorPoly) -> VectorPoly:
    """Analytic part of (A* F): the Hilbert-space adjoint action on vector
    elements when A acts by multiplication.

    For the block shift matrices this reproduces the componentwise co-shift
    pattern used in the co-invariance conclusions.
    """
    Aadj = adjoint_on_circle(A)
    if Aadj.cols != F.m:
        raise DimensionMismatch(
            f"adjoint has {Aadj.cols} columns but the vector has arity {F.m}"
        )
    cap = F.cap
    comps = []
    for i in range(Aadj.rows):
        acc = np.zeros(cap + 1, dtype=np.complex128)
        for j in range(F.m):
            a = Aadj.table[i, j]
            fj = F.components[j]
            if not np.any(a) or fj.is_zero():
                continue
            seg = np.convolve(a, fj.coeffs[: fj.deg() + 1])
            lo = Aadj.min_pow  # power of seg[0]
            # keep only powers 0..cap
            start = max(0, -lo)
            for t in range(start, seg.size):
                p = lo + t
                if p > cap:
                    break
                acc[p] += seg[t]
        comps.append(TaylorPoly(acc, cap))
    return VectorPoly(tuple(comps))


def eval_at(A: LaurentMatrix, z: complex) -> np.ndarray:
    """Pointwise value on (or off) the circle; used by sampling oracles."""
    pows = z ** np.arange(A.min_pow, A.max_pow + 1, dtype=float)
    return A.table @ pows
