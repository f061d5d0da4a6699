"""Commuting matrix tuples: powers, orbits, commutants and intertwiner spaces.

A commuting n-tuple of d x d complex matrices is the basic object of the
library.  Everything here is a pure function over immutable inputs; matrices
are dense complex double precision.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ArityMismatch,
    NonCommuting,
    ShapeMismatch,
    SingularFactor,
)

__all__ = [
    "OperatorTuple",
    "Subspace",
    "IntertwinerSpace",
    "validate_tuple",
    "power",
    "box_indices",
    "orbit_infimum",
    "power_bound_estimate",
    "spectral_radius_report",
    "SpectralRadiusReport",
    "commutant_basis",
    "intertwiner_space",
    "direct_sum",
    "inverse_tuple",
]

_RANK_RTOL = 1e-8


def _as_complex(mat):
    a = np.asarray(mat, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ShapeMismatch(f"expected a square matrix, got shape {a.shape}")
    return a


@dataclass(frozen=True)
class OperatorTuple:
    """A commuting n-tuple of d x d complex matrices.

    Construct through :func:`validate_tuple`, which checks the pairwise
    commutators against ``commute_tol`` (relative, scaled by the factor
    norms).
    """

    mats: tuple
    commute_tol: float = 1e-10
    worst_commutator: float = field(default=0.0, compare=False)

    @property
    def n(self):
        return len(self.mats)

    @property
    def dim(self):
        return self.mats[0].shape[0]

    def adjoint(self):
        return OperatorTuple(tuple(m.conj().T for m in self.mats), self.commute_tol)

    def __iter__(self):
        return iter(self.mats)

    def __getitem__(self, i):
        return self.mats[i]


@dataclass(frozen=True)
class Subspace:
    """A subspace given by a d x r matrix with orthonormal columns."""

    basis: np.ndarray
    ortho_tol: float = 1e-10

    @property
    def dim(self):
        return self.basis.shape[1]

    @property
    def ambient_dim(self):
        return self.basis.shape[0]

    def __post_init__(self):
        q = self.basis
        if q.shape[1] > 0:
            gram = q.conj().T @ q
            err = np.linalg.norm(gram - np.eye(q.shape[1]))
            if err > self.ortho_tol * max(1, q.shape[1]):
                raise ShapeMismatch(f"basis columns not orthonormal (residual {err:.3e})")

    def contains(self, v, tol=1e-8):
        v = np.asarray(v, dtype=complex)
        proj = self.basis @ (self.basis.conj().T @ v)
        return np.linalg.norm(v - proj) <= tol * max(1.0, np.linalg.norm(v))


@dataclass(frozen=True)
class IntertwinerSpace:
    """Basis of {X : X T_i = S_i X for all i} for tuples T (source), S (target)."""

    source: OperatorTuple
    target: OperatorTuple
    basis: tuple

    @property
    def dim(self):
        return len(self.basis)

    def contains(self, X, tol=1e-8):
        """Whether X lies in the span of the basis (relative residual test)."""
        X = np.asarray(X, dtype=complex)
        if self.dim == 0:
            return np.linalg.norm(X) <= tol
        stack = np.stack([b.ravel() for b in self.basis], axis=1)
        coef, *_ = np.linalg.lstsq(stack, X.ravel(), rcond=None)
        resid = np.linalg.norm(stack @ coef - X.ravel())
        return resid <= tol * max(1.0, np.linalg.norm(X))


def validate_tuple(mats, tol=1e-10):
    """Build an :class:`OperatorTuple`, verifying pairwise commutation.

    Raises :class:`NonCommuting` with the offending pair and relative
    residual when the check fails, :class:`ShapeMismatch` for ragged input.
    """
    arrs = tuple(_as_complex(m) for m in mats)
    if not arrs:
        raise ShapeMismatch("a tuple needs at least one matrix")
    d = arrs[0].shape[0]
    for a in arrs[1:]:
        if a.shape[0] != d:
            raise ShapeMismatch("all matrices must share the same dimension")
    worst = 0.0
    # Frobenius norms: cheap, and within a factor sqrt(d) of the operator
    # norm, which is ample for a commutation residual scale
    for i, j in itertools.combinations(range(len(arrs)), 2):
        scale = max(np.linalg.norm(arrs[i]) * np.linalg.norm(arrs[j]), 1e-300)
        resid = np.linalg.norm(arrs[i] @ arrs[j] - arrs[j] @ arrs[i]) / scale
        worst = max(worst, resid)
        if resid > tol:
            raise NonCommuting(i, j, resid)
    return OperatorTuple(arrs, tol, worst)


def _check_multiindex(t, k):
    k = tuple(int(v) for v in k)
    if len(k) != t.n:
        raise ArityMismatch(f"multi-index length {len(k)} != arity {t.n}")
    return k


def power(t, k):
    """T_1^{k_1} ... T_n^{k_n}; negative entries require invertible factors."""
    k = _check_multiindex(t, k)
    d = t.dim
    out = np.eye(d, dtype=complex)
    for i, ki in enumerate(k):
        if ki == 0:
            continue
        m = t.mats[i]
        if ki < 0:
            _check_invertible(m, i)
            m = np.linalg.inv(m)
            ki = -ki
        out = out @ np.linalg.matrix_power(m, ki)
    return out


def _check_invertible(m, i, rtol=_RANK_RTOL):
    if m.shape[0] == 0:
        return
    s = np.linalg.svd(m, compute_uv=False)
    if s[-1] <= rtol * s[0] or s[0] == 0.0:
        raise SingularFactor(i, f"smallest singular value {s[-1]:.3e}")


def box_indices(n, horizon):
    """All multi-indices in the box 0 <= k_i <= horizon."""
    return itertools.product(range(horizon + 1), repeat=n)


def _orbit_norms(t, h, horizon):
    """Yield (k, ||T^k h||) over the box, reusing partial applications."""
    h = np.asarray(h, dtype=complex)

    def rec(i, v):
        if i == t.n:
            yield np.linalg.norm(v)
            return
        w = v
        for _ in range(horizon + 1):
            yield from rec(i + 1, w)
            w = t.mats[i] @ w

    # rec applies T_i 0..horizon times in coordinate order
    yield from rec(0, h)


def orbit_infimum(t, h, horizon):
    """min ||T^k h|| over the box 0 <= k_i <= horizon.

    This is an upper bound on the true orbit infimum over all of Z_+^n;
    for tuples of contractions the orbit norms form a decreasing net, so the
    box minimum is attained at the far corner and converges to the net limit
    as the horizon grows.
    """
    if horizon < 0:
        raise ValueError("horizon must be >= 0")
    return min(_orbit_norms(t, h, horizon))


def power_bound_estimate(t, horizon):
    """(max ||T^k|| over the box, growing flag).

    The value is a lower bound for sup over all of Z_+^n.  ``growing`` is set
    when the maximum sits on the box boundary and exceeds the interior
    maximum by more than 1%, a heuristic signal that the powers are unbounded.
    """
    best = 0.0
    interior_best = 0.0
    boundary_best = 0.0
    prods = {(): np.eye(t.dim, dtype=complex)}

    for k in box_indices(t.n, horizon):
        m = _box_product(t, k, prods)
        v = np.linalg.norm(m, 2)
        best = max(best, v)
        if any(ki == horizon for ki in k):
            boundary_best = max(boundary_best, v)
        else:
            interior_best = max(interior_best, v)
    growing = horizon > 0 and boundary_best > 1.01 * max(interior_best, 1e-300)
    return best, growing


def _box_product(t, k, cache):
    """T^k with memoization along the last nonzero coordinate."""
    if k in cache:
        return cache[k]
    for i in range(t.n - 1, -1, -1):
        if k[i] > 0:
            prev = list(k)
            prev[i] -= 1
            m = t.mats[i] @ _box_product(t, tuple(prev), cache)
            cache[k] = m
            return m
    return cache[()]


@dataclass(frozen=True)
class SpectralRadiusReport:
    radii: tuple          # (k, r(T^k)) pairs
    verdict: str | None   # 'zero_type_certified' | 'necessary_condition_failed' | None

    @property
    def min_radius(self):
        return min(r for _, r in self.radii)


def spectral_radius_report(t, ks, invertibility_rtol=_RANK_RTOL):
    """Spectral radii r(T^k) and the resulting existence verdicts.

    A nonzero intertwiner to unitaries forces r(T^k) >= 1 for all k in
    Z_+^n, so any radius below 1 certifies that no such intertwiner exists
    (``necessary_condition_failed``).  For invertible tuples, any radius
    different from 1 certifies that the tuple is of 0-type
    (``zero_type_certified``): the degenerate pair is its unitary asymptote.
    """
    radii = []
    invertible = True
    for i, m in enumerate(t.mats):
        try:
            _check_invertible(m, i, invertibility_rtol)
        except SingularFactor:
            invertible = False
    for k in ks:
        k = _check_multiindex(t, k)
        if any(ki < 0 for ki in k) and not invertible:
            raise SingularFactor(0, "negative powers of a singular tuple")
        m = power(t, k)
        r = max(abs(np.linalg.eigvals(m))) if t.dim > 0 else 0.0
        radii.append((k, float(r)))
    verdict = None
    if any(r < 1.0 - 1e-12 for k, r in radii if all(ki >= 0 for ki in k)):
        verdict = "necessary_condition_failed"
    if invertible and any(abs(r - 1.0) > 1e-8 for _, r in radii):
        verdict = "zero_type_certified"
    return SpectralRadiusReport(tuple(radii), verdict)


def _nullspace(mat, rtol=_RANK_RTOL):
    """Orthonormal basis of the nullspace, singular values below rtol*smax."""
    if mat.shape[0] == 0:
        return np.eye(mat.shape[1], dtype=complex)
    u, s, vh = np.linalg.svd(mat)
    smax = s[0] if s.size else 0.0
    rank = int(np.sum(s > rtol * smax)) if smax > 0 else 0
    return vh[rank:].conj().T


def intertwiner_space(t, t2, rtol=_RANK_RTOL):
    """Basis of {X : X T_i = T2_i X for all i} from the stacked Kronecker system.

    Using column-major vec, X T_i - T2_i X = 0 becomes
    (T_i^T kron I - I kron T2_i) vec(X) = 0; the bases are the SVD nullspace
    vectors of the stacked system, reshaped.
    """
    if t.n != t2.n:
        raise ArityMismatch(f"arities {t.n} and {t2.n} differ")
    d, d2 = t.dim, t2.dim
    blocks = []
    for a, b in zip(t.mats, t2.mats):
        blocks.append(np.kron(a.T, np.eye(d2)) - np.kron(np.eye(d), b))
    system = np.vstack(blocks) if blocks else np.zeros((0, d * d2))
    ns = _nullspace(system, rtol)
    basis = tuple(ns[:, j].reshape((d2, d), order="F") for j in range(ns.shape[1]))
    return IntertwinerSpace(t, t2, basis)


def commutant_basis(t, rtol=_RANK_RTOL):
    """Basis of the commutant {T}' = I(T, T)."""
    return intertwiner_space(t, t, rtol)


def direct_sum(t1, t2):
    """Blockwise direct sum of two tuples of equal arity."""
    if t1.n != t2.n:
        raise ArityMismatch(f"arities {t1.n} and {t2.n} differ")
    mats = []
    for a, b in zip(t1.mats, t2.mats):
        m = np.zeros((a.shape[0] + b.shape[0],) * 2, dtype=complex)
        m[: a.shape[0], : a.shape[0]] = a
        m[a.shape[0] :, a.shape[0] :] = b
        mats.append(m)
    tol = max(t1.commute_tol, t2.commute_tol)
    return validate_tuple(mats, tol)


def inverse_tuple(t, rtol=_RANK_RTOL):
    """Tuple of inverses; raises SingularFactor(i) on a near-singular factor."""
    invs = []
    for i, m in enumerate(t.mats):
        _check_invertible(m, i, rtol)
        invs.append(np.linalg.inv(m))
    return validate_tuple(invs, max(t.commute_tol, 1e-9))
