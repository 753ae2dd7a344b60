"""Finite products of disc automorphisms, their Toeplitz operators, the
associated model space, and layer coordinates for the attached isometry.

Expansions are geometric-series based and deliberately truncated at the
working cap; every construction that truncates reports (or bounds) the
discarded tail, which decays like max_j |z_j|^cap.  Zeros on (or within
1e-12 of) the unit circle are rejected.

The forward coordinate map ``u_apply`` is scalar-to-vector: the i-th power
of the product times the j-th model basis vector is sent to z^i in
component j.  That is the direction in which the conjugation identity
S^m (lift ∘ U) = (lift ∘ U) T_B composes; the reverse map is ``u_invert``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import BudgetExceeded, DepthExhausted, ParamOutOfRange, ZeroOnCircle
from .series import TaylorPoly, sub as poly_sub
from .subspaces import SpanSubspace, orthonormalize
from .tolerances import MEMBERSHIP_TOL
from .veclift import VectorPoly, t_m_apply, t_m_invert

__all__ = [
    "BlaschkeProduct",
    "WoldFrame",
    "taylor_expand",
    "tail_bound",
    "power_expansion",
    "toeplitz_apply",
    "model_basis",
    "build_wold_frame",
    "u_apply",
    "u_invert",
    "check_conjugation",
    "transfer_subspace",
]

_CIRCLE_MARGIN = 1e-12


@dataclass(frozen=True)
class BlaschkeProduct:
    """Unimodular constant times factors (z - z_j)/(1 - conj(z_j) z)."""

    lam: complex
    zeros: tuple

    def __post_init__(self) -> None:
        lam = complex(self.lam)
        if abs(abs(lam) - 1.0) > 1e-14:
            raise ParamOutOfRange(f"|lambda| must be 1, got {abs(lam)!r}")
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "zeros", tuple(complex(z) for z in self.zeros))

    @property
    def degree(self) -> int:
        return len(self.zeros)

    def check_zeros(self) -> None:
        for z in self.zeros:
            if abs(z) >= 1.0 - _CIRCLE_MARGIN:
                raise ZeroOnCircle(f"factor zero {z!r} is not strictly inside the disc")

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"BlaschkeProduct(degree={self.degree})"


def _divide_geometric(arr: np.ndarray, a: complex, width: int) -> np.ndarray:
    """Division by (1 - conj(a) z) out to the given width:
    out[n] = arr[n] + conj(a) out[n-1].  The quotient has an infinite tail
    for a != 0, so the input is zero-padded to the full width first."""
    abar = complex(np.conj(a))
    if abar == 0:
        return arr.astype(np.complex128, copy=True)
    out = np.zeros(width, dtype=np.complex128)
    out[: min(arr.size, width)] = arr[:width]
    for n in range(1, width):
        out[n] += abar * out[n - 1]
    return out


def _mul_z_minus(arr: np.ndarray, a: complex, width: int) -> np.ndarray:
    """Multiply by (z - a), truncating the result to the given width."""
    arr = arr[:width]
    out = np.zeros(min(arr.size + 1, width), dtype=np.complex128)
    out[: arr.size] -= a * arr
    out[1: arr.size + 1] += arr[: out.size - 1]
    return out


def tail_bound(B: BlaschkeProduct, cap: int) -> float:
    """Bound on any single discarded coefficient of the degree-cap expansion."""
    radii = [abs(z) for z in B.zeros if z != 0]
    if not radii:
        return 0.0
    rho = max(radii)
    return float(B.degree * rho ** max(0, cap - B.degree + 1))


def taylor_expand(B: BlaschkeProduct, cap: int) -> TaylorPoly:
    """Coefficients 0..cap of the product; exact when all zeros sit at 0."""
    if cap < B.degree:
        raise BudgetExceeded(f"cap {cap} is below the product degree {B.degree}")
    B.check_zeros()
    width = cap + 1
    arr = np.zeros(1, dtype=np.complex128)
    arr[0] = B.lam
    for a in B.zeros:
        arr = _divide_geometric(_mul_z_minus(arr, a, width), a, width)
    return TaylorPoly(arr, cap)


def power_expansion(B: BlaschkeProduct, n: int, cap: int) -> TaylorPoly:
    """Degree-cap expansion of the n-th power (truncating convolution)."""
    if n < 1:
        raise ParamOutOfRange("power must be >= 1")
    base = taylor_expand(B, cap).coeffs
    acc = base
    for _ in range(n - 1):
        acc = np.convolve(acc, base)[: cap + 1]
    return TaylorPoly(acc, cap)


def toeplitz_apply(B: BlaschkeProduct, n: int, adjoint: bool,
                   f: TaylorPoly) -> TaylorPoly:
    """Multiplication by the n-th power of the product, or its adjoint.

    A pure-monomial symbol is an exact shift and keeps the shift budget
    guard.  For symbols with off-origin zeros the result is truncated at
    the cap; the truncation is exact-at-truncation (an analytic factor
    cannot move mass downward, so cut tails never pollute kept
    coefficients) and the discarded mass is bounded by ``tail_bound``.
    The adjoint direction is the coefficientwise co-analytic pairing and
    never needs extra budget.
    """
    cap = f.cap
    if f.is_zero():
        return f
    if not adjoint and all(z == 0 for z in B.zeros):
        if f.deg() + n * B.degree > cap:
            raise BudgetExceeded(
                f"degree {f.deg()} + {n * B.degree} exceeds cap {cap}"
            )
        return _scaled_shift(f, n * B.degree, B.lam ** n)
    b = power_expansion(B, n, cap).padded(cap + 1)
    if not adjoint:
        out = np.convolve(b, f.coeffs[: f.deg() + 1])[: cap + 1]
        return TaylorPoly(out, cap)
    fc = f.padded(cap + 1)
    bb = np.conj(b)
    out = np.zeros(cap + 1, dtype=np.complex128)
    for j in range(cap + 1):
        klen = cap + 1 - j
        out[j] = np.dot(bb[:klen], fc[j:])
    return TaylorPoly(out, cap)


def _scaled_shift(f: TaylorPoly, k: int, c: complex) -> TaylorPoly:
    from .series import scale, shift_pow

    return scale(shift_pow(f, k), c)


def model_basis(B: BlaschkeProduct, cap: int) -> tuple:
    """Orthonormal basis of the model space built from the zero list in
    the given order; valid for repeated zeros.

    Basis vector k is the normalized reproducing kernel at zero k times
    the partial product of the earlier factors.
    """
    B.check_zeros()
    if cap < B.degree:
        raise BudgetExceeded(f"cap {cap} is below the product degree {B.degree}")
    width = cap + 1
    prefix = np.zeros(1, dtype=np.complex128)
    prefix[0] = 1.0
    basis = []
    for a in B.zeros:
        scale = math.sqrt(1.0 - abs(a) ** 2)
        ek = scale * _divide_geometric(prefix, a, width)
        basis.append(TaylorPoly(ek, cap))
        prefix = _divide_geometric(_mul_z_minus(prefix, a, width), a, width)
    return tuple(basis)


@dataclass(frozen=True, eq=False)
class WoldFrame:
    """Layer frame: powers of the product times the model basis, truncated.

    layers[i][j] models B^i e_j up to the cap; entries whose support lies
    entirely above the cap are stored as zero and skipped in diagnostics.
    """

    blaschke: BlaschkeProduct
    basis: tuple
    layers: tuple
    depth: int
    cap: int

    @property
    def m(self) -> int:
        return len(self.basis)

    def layer_matrix(self) -> np.ndarray:
        """Columns ordered layer-major: (i, j) -> column i*m + j."""
        cols = []
        for layer in self.layers:
            for vec in layer:
                cols.append(vec.padded(self.cap + 1))
        return np.column_stack(cols)

    def gram_defect(self) -> float:
        """Max deviation of the nonzero layer vectors' Gram matrix from I."""
        A = self.layer_matrix()
        keep = [c for c in range(A.shape[1]) if np.linalg.norm(A[:, c]) > 0.5]
        A = A[:, keep]
        G = A.conj().T @ A
        return float(np.max(np.abs(G - np.eye(G.shape[0]))))


def build_wold_frame(B: BlaschkeProduct, cap: int,
                     depth: Optional[int] = None) -> WoldFrame:
    """Build layers 0..depth-1.  The default depth fills the cap: layers
    stop once a lift of the covered coordinates could not fit."""
    basis = model_basis(B, cap)
    m = B.degree
    if depth is None:
        depth = max(1, (cap + 1) // m)
    if depth < 1:
        raise ParamOutOfRange("depth must be >= 1")
    bexp = taylor_expand(B, cap).coeffs
    layers = []
    current = [e.padded(cap + 1) for e in basis]
    for _ in range(depth):
        layers.append(tuple(TaylorPoly(v, cap) for v in current))
        current = [np.convolve(bexp, v)[: cap + 1] for v in current]
    return WoldFrame(B, basis, tuple(layers), depth, cap)


def u_apply(f: TaylorPoly, W: WoldFrame,
            tol: float = MEMBERSHIP_TOL) -> tuple:
    """Layer coordinates of f, as a vector element, with the uncovered
    residual.  Raises DepthExhausted when the residual exceeds tol.

    The coordinates are the inner products against the layer vectors.
    This is the least-squares solution in the true geometry: the
    untruncated layers are orthonormal, and an element under the cap
    pairs identically with a layer and with its truncation, so the
    inner products are the exact expansion coefficients and the
    uncovered mass is ||f||^2 minus their square sum.
    """
    if f.cap != W.cap:
        raise ValueError("element cap must match the frame cap")
    A = W.layer_matrix()
    v = f.padded(W.cap + 1)
    coords = A.conj().T @ v
    residual = float(np.linalg.norm(v - A @ coords))
    if residual > tol:
        raise DepthExhausted(
            f"layer frame of depth {W.depth} leaves residual {residual:.3e}",
            residual,
        )
    m = W.m
    comps = []
    for j in range(m):
        comps.append(TaylorPoly(coords[j::m], W.cap))
    return VectorPoly(tuple(comps)), residual


def u_invert(F: VectorPoly, W: WoldFrame) -> TaylorPoly:
    """Reassemble a scalar element from layer coordinates."""
    if F.m != W.m:
        raise ValueError("vector arity must match the model dimension")
    if F.deg() >= W.depth:
        raise DepthExhausted(
            f"coordinates reach layer {F.deg()} but the frame has depth {W.depth}",
            float("nan"),
        )
    acc = np.zeros(W.cap + 1, dtype=np.complex128)
    for j, comp in enumerate(F.components):
        d = comp.deg()
        for i in range(d + 1):
            c = comp.coeffs[i]
            if c != 0:
                acc += c * W.layers[i][j].padded(W.cap + 1)
    return TaylorPoly(acc, W.cap)


def check_conjugation(B: BlaschkeProduct, n: int, f: TaylorPoly, W: WoldFrame,
                      tol: float = MEMBERSHIP_TOL) -> float:
    """Residual of the conjugation identity on f:
    shift by m*n after lifting the coordinates of f, versus lifting the
    coordinates of the Toeplitz image.  Small on the covered band."""
    from .series import shift_pow

    m = W.m
    F, _ = u_apply(f, W, tol)
    lhs = shift_pow(t_m_apply(F), m * n)
    g = toeplitz_apply(B, n, False, f)
    G, _ = u_apply(g, W, tol)
    rhs = t_m_apply(G)
    return poly_sub(lhs, rhs).norm()


def transfer_subspace(M: SpanSubspace, B: BlaschkeProduct, W: WoldFrame,
                      direction: str, tol: float = MEMBERSHIP_TOL) -> SpanSubspace:
    """Unitary transport of a capped scalar subspace between the Toeplitz
    picture and the power-shift picture.

    to_shift:   frame vector u  ->  lift(u_apply(u))
    to_toeplitz: frame vector u ->  u_invert(de-interleave(u))
    Invariance verdicts transfer along this map on the covered band.
    """
    if direction not in ("to_shift", "to_toeplitz"):
        raise ParamOutOfRange(f"unknown direction {direction!r}")
    if M.arity != 1:
        raise ValueError("transfer acts on scalar subspaces")
    if M.cap != W.cap:
        raise ValueError("subspace cap must match the frame cap")
    if B != W.blaschke:
        raise ValueError("frame was built for a different product")
    images = []
    for u in M.frame:
        if direction == "to_shift":
            F, _ = u_apply(u, W, tol)
            images.append(t_m_apply(F))
        else:
            images.append(u_invert(t_m_invert(u, W.m), W))
    label = f"{direction}({M.label or 'M'})"
    if not images:
        return SpanSubspace((), M.cap, 1, M.rank_tol, label=label)
    return orthonormalize(images, M.rank_tol, label=label)
