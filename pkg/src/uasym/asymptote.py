"""Construction and analysis of unitary asymptotes of commuting tuples.

The limit operator A representing the invariant-mean sesquilinear form
lim <T^k x, T^k y> is built two independent ways: by iterated box-Cesaro
averaging (``cesaro_limit``) and in closed form from the joint root-space
decomposition (``exact_limit``).  ``build_asymptote`` turns A into the
intertwining pair (X, U) with X = A^(1/2) corestricted to the closure of
the range of A.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import tuples as tp
from .errors import (
    ArityMismatch,
    DecompositionFailed,
    Diverging,
    HorizonExhaustedWarning,
    NoFactorization,
    NonSemisimpleUnimodular,
    NonUnique,
    NotInCommutant,
    NotIntertwining,
    SingularFactor,
    ZeroX,
)
from .tuples import OperatorTuple, Subspace, validate_tuple

__all__ = [
    "LimitOperator",
    "UnitaryAsymptote",
    "NormControlReport",
    "OrbitConditionReport",
    "cesaro_limit",
    "exact_limit",
    "joint_root_decomposition",
    "build_asymptote",
    "minimal_part",
    "annihilating_subspace",
    "check_orbit_conditions",
    "commutant_mapping",
    "norm_control",
    "check_equivalence",
    "transport_similarity",
    "asymptote_of_inverse",
    "direct_sum_asymptote",
    "recover_summands",
    "verify_universality",
]

_RANK_RTOL = 1e-8


@dataclass(frozen=True)
class LimitOperator:
    """Positive-semidefinite A with T_i^H A T_i = A for all i."""

    A: np.ndarray
    method: str                      # 'cesaro' | 'exact'
    iterations: int
    residual: float                  # last checkpoint difference (cesaro)
    converged: bool = True
    stable_basis: np.ndarray | None = field(default=None, compare=False)

    def isometry_residual(self, t):
        scale = max(np.linalg.norm(self.A, 2), 1e-300)
        return max(
            np.linalg.norm(m.conj().T @ self.A @ m - self.A, 2) / scale for m in t.mats
        )


@dataclass(frozen=True)
class UnitaryAsymptote:
    """The pair (X, U): X maps H into the space K of the unitary tuple U.

    dim_K == 0 encodes the degenerate asymptote of a 0-type tuple.
    """

    source: OperatorTuple
    X: np.ndarray                 # d_K x d
    U: OperatorTuple
    method: str = "exact"
    loc_bound: float | None = None
    kappa_upper: float | None = None
    A: np.ndarray | None = field(default=None, compare=False)

    @property
    def dim_K(self):
        return self.X.shape[0]

    @property
    def X_norm(self):
        return float(np.linalg.norm(self.X, 2)) if self.X.size else 0.0

    @property
    def is_degenerate(self):
        return self.dim_K == 0

    def intertwining_residual(self):
        if self.is_degenerate:
            return 0.0
        out = 0.0
        for ti, ui in zip(self.source.mats, self.U.mats):
            scale = max(self.X_norm * np.linalg.norm(ti, 2), 1e-300)
            out = max(out, np.linalg.norm(self.X @ ti - ui @ self.X, 2) / scale)
        return out


def _box_average(t, A, N):
    """N^{-n} sum over the box [0,N)^n of (T^k)^H A T^k, coordinate by coordinate."""
    for m in t.mats:
        acc = np.zeros_like(A)
        cur = A
        mh = m.conj().T
        for _ in range(N):
            acc += cur
            cur = mh @ cur @ m
        A = acc / N
    return A


def cesaro_limit(t, max_N=65536, tol=1e-9):
    """Invariant-mean limit operator by iterated box-Cesaro averaging.

    One box average damps every oscillating cross term by the factor
    |sigma_N(w)| <= 2/(N|1-w|) and leaves the invariant part fixed, so
    iterating the average converges geometrically; the box size is enlarged
    when the contraction stalls (nearby unimodular joint eigenvalues).
    """
    if t.dim == 0:
        return LimitOperator(np.zeros((0, 0), dtype=complex), "cesaro", 0, 0.0)
    _, growing = tp.power_bound_estimate(t, min(6, max(2, 24 // t.n)))
    if growing:
        # transient growth of a stable non-normal part also trips the norm
        # scan; only raise when an eigenvalue actually leaves the unit disc
        radius = max(np.max(np.abs(np.linalg.eigvals(m))) for m in t.mats)
        if radius > 1.0 + 1e-6:
            raise Diverging("power-bound pre-scan flagged growing norms")

    N = min(64, max_N)
    A = np.eye(t.dim, dtype=complex)
    norm0 = float(t.dim)
    best = A
    best_diff = np.inf
    diffs = []
    iterations = 0
    while True:
        A_new = _box_average(t, A, N)
        iterations += 1
        diff = np.linalg.norm(A_new - A, 2) / max(1.0, np.linalg.norm(A_new, 2))
        diffs.append(diff)
        A = A_new
        if diff < best_diff:
            best, best_diff = A, diff
        if diff < tol:
            A = (A + A.conj().T) / 2
            return LimitOperator(A, "cesaro", iterations, float(diff))
        if np.linalg.norm(A, 2) > 1e9 * max(norm0, 1.0):
            raise Diverging("averaged operator norm is growing without bound")
        stalled = len(diffs) >= 4 and diffs[-1] > 0.5 * diffs[-4]
        if stalled or iterations % 48 == 0:
            if N >= max_N:
                warnings.warn(
                    f"tolerance {tol:.1e} unmet at box size {max_N}; "
                    f"returning best iterate (diff {best_diff:.3e})",
                    HorizonExhaustedWarning,
                )
                bestH = (best + best.conj().T) / 2
                return LimitOperator(bestH, "cesaro", iterations, float(best_diff), False)
            N = min(4 * N, max_N)
            diffs.clear()


def _cluster_points(points, tol):
    """Greedy connectivity clustering of complex points; returns index groups."""
    points = np.asarray(points)
    order = list(range(len(points)))
    groups = []
    while order:
        seed = order.pop(0)
        group = [seed]
        changed = True
        while changed:
            changed = False
            for idx in order[:]:
                if any(abs(points[idx] - points[g]) <= tol for g in group):
                    group.append(idx)
                    order.remove(idx)
                    changed = True
        groups.append(sorted(group))
    return groups


def _invariant_cluster_basis(R, group_eigs, other_eigs):
    """Orthonormal basis of the root subspace of R for a cluster of eigenvalues.

    An eigenvalue is selected when it is strictly closer to the cluster than
    to any eigenvalue outside it, which is robust against perturbed copies.
    """
    group_eigs = np.asarray(group_eigs)
    other_eigs = np.asarray(other_eigs)

    def select(z):
        dg = np.min(np.abs(z - group_eigs))
        do = np.min(np.abs(z - other_eigs)) if other_eigs.size else np.inf
        return bool(dg < do)

    T, Z, sdim = scipy.linalg.schur(R, output="complex", sort=select)
    if sdim != len(group_eigs):
        raise DecompositionFailed(
            f"Schur reordering selected {sdim} eigenvalues, expected {len(group_eigs)}"
        )
    return Z[:, :sdim]


def joint_root_decomposition(t, cluster_tol=1e-7, stable_threshold=None):
    """Split C^d into joint root subspaces of the commuting tuple.

    Returns a list of (z, V): the joint eigenvalue z in C^n and an
    orthonormal basis V of the corresponding root subspace.  The subspaces
    sum directly (obliquely) to the whole space.  Root subspaces of T_1 are
    invariant under everything commuting with T_1, so refining coordinate by
    coordinate is legitimate.

    With stable_threshold set, every eigenvalue of modulus below it is pooled
    into a single invariant subspace per branch, returned with z = None, and
    not refined further.  Pooling avoids splitting clusters scattered by the
    eigenvalue sensitivity of nontrivial Jordan structure, which only occurs
    in the part that contributes nothing to the limit operator anyway.
    """
    spaces = [(np.eye(t.dim, dtype=complex), (), False)]
    for m in t.mats:
        refined = []
        for V, zs, done in spaces:
            if done:
                refined.append((V, zs, True))
                continue
            R = V.conj().T @ (m @ V)
            eigs = np.linalg.eigvals(R)
            live = np.arange(len(eigs))
            if stable_threshold is not None:
                low = np.abs(eigs) < stable_threshold
                if np.all(low):
                    refined.append((V, None, True))
                    continue
                if np.any(low):
                    live = np.flatnonzero(~low)
                    Q = _invariant_cluster_basis(R, eigs[low], eigs[~low])
                    refined.append((V @ Q, None, True))
            groups = _cluster_points(eigs[live], cluster_tol)
            if len(groups) == 1 and len(live) == len(eigs):
                refined.append((V, zs + (complex(np.mean(eigs)),), False))
                continue
            for g in groups:
                sel = live[g]
                rest = np.setdiff1d(np.arange(len(eigs)), sel)
                Q = _invariant_cluster_basis(R, eigs[sel], eigs[rest])
                refined.append((V @ Q, zs + (complex(np.mean(eigs[sel])),), False))
        spaces = refined
    return [(None if zs is None else np.array(zs), V) for V, zs, _ in spaces]


def exact_limit(t, cluster_tol=1e-7, unimodular_tol=1e-8, cross_check_tol=1e-7):
    """Closed-form limit operator A = sum over unimodular joint eigenvalues z
    of Pi_z^H Pi_z, with Pi_z the oblique joint spectral projection.

    Cross terms between distinct unimodular eigenvalues average to zero
    coordinatewise, and stable components vanish, so this equals the
    invariant-mean limit.  Requires every unimodular joint eigenvalue to be
    semisimple (otherwise the tuple is not power bounded) and every joint
    eigenvalue to lie in the closed unit polydisc.
    """
    d = t.dim
    if d == 0:
        return LimitOperator(np.zeros((0, 0), dtype=complex), "exact", 0, 0.0)
    decomp = joint_root_decomposition(t, cluster_tol, stable_threshold=0.9)
    unimodular = []
    stable = []
    for z, V in decomp:
        if z is None:
            stable.append((z, V))
            continue
        mods = np.abs(z)
        if np.all(np.abs(mods - 1.0) <= unimodular_tol):
            for i, m in enumerate(t.mats):
                R = V.conj().T @ (m @ V)
                dev = np.linalg.norm(R - z[i] * np.eye(V.shape[1]), 2)
                if dev > 1e-7 * max(1.0, abs(z[i])):
                    raise NonSemisimpleUnimodular(
                        f"unimodular joint eigenvalue {z} carries a nontrivial "
                        f"Jordan structure (deviation {dev:.3e})"
                    )
            unimodular.append((z, V))
        elif np.all(mods <= 1.0 + unimodular_tol):
            stable.append((z, V))
        else:
            raise DecompositionFailed(
                f"joint eigenvalue {z} lies outside the closed unit polydisc"
            )
    S = np.hstack([V for _, V in unimodular] + [V for _, V in stable])
    if S.shape[1] != d:
        raise DecompositionFailed("root subspaces do not exhaust the space")
    cond = np.linalg.cond(S)
    if not np.isfinite(cond) or cond > 1e12:
        raise DecompositionFailed(f"root-space basis is ill conditioned ({cond:.3e})")
    Sinv = np.linalg.inv(S)
    A = np.zeros((d, d), dtype=complex)
    offset = 0
    for _, V in unimodular:
        r = V.shape[1]
        Pi = S[:, offset : offset + r] @ Sinv[offset : offset + r, :]
        A += Pi.conj().T @ Pi
        offset += r
    A = (A + A.conj().T) / 2
    stable_basis = (
        scipy.linalg.orth(np.hstack([V for _, V in stable]))
        if stable
        else np.zeros((d, 0), dtype=complex)
    )
    return LimitOperator(A, "exact", 0, 0.0, stable_basis=stable_basis)


def build_asymptote(t, method="auto", rank_rtol=_RANK_RTOL, **limit_kwargs):
    """Unitary asymptote (X, U) of a power-bounded tuple.

    K is the closure of the range of the limit operator A, X = A^(1/2)
    corestricted to K, and U_i is defined on K by U_i(Xh) = X(T_i h); the
    resulting isometries on the finite-dimensional K are already unitary.
    Satisfies the lower orbit condition with bound-control 1.
    """
    if method == "cesaro":
        lim = cesaro_limit(t, **limit_kwargs)
    elif method == "exact":
        lim = exact_limit(t, **limit_kwargs)
    elif method == "auto":
        try:
            lim = exact_limit(t, **limit_kwargs)
        except DecompositionFailed:
            lim = cesaro_limit(t)
    else:
        raise ValueError(f"unknown method {method!r}")
    return asymptote_from_limit(t, lim, rank_rtol)


def asymptote_from_limit(t, lim, rank_rtol=_RANK_RTOL):
    """Turn a limit operator into the canonical asymptote (X, U)."""
    A = lim.A
    d = t.dim
    if d == 0:
        U = OperatorTuple(tuple(np.zeros((0, 0), dtype=complex) for _ in range(t.n)))
        return UnitaryAsymptote(t, np.zeros((0, 0), dtype=complex), U, lim.method,
                                loc_bound=1.0, A=A)
    w, Q = np.linalg.eigh(A)
    wmax = max(float(w[-1]), 0.0)
    keep = w > rank_rtol * wmax if wmax > 0 else np.zeros(d, dtype=bool)
    r = int(np.sum(keep))
    Qr = Q[:, keep]
    sq = np.sqrt(w[keep])
    X = sq[:, None] * Qr.conj().T                     # A^{1/2} corestricted to K
    Xpinv = Qr / sq[None, :] if r else Qr
    mats = []
    for m in t.mats:
        Ui = X @ m @ Xpinv
        # snap the isometry to its unitary polar factor; in exact arithmetic
        # it is already unitary
        if r:
            uw, _, vh = np.linalg.svd(Ui)
            Ui = uw @ vh
        mats.append(Ui)
    U = validate_tuple(mats, max(1e-8, t.commute_tol)) if r else OperatorTuple(
        tuple(np.zeros((0, 0), dtype=complex) for _ in range(t.n))
    )
    a = UnitaryAsymptote(t, X, U, lim.method, loc_bound=1.0, A=A)
    resid = a.intertwining_residual()
    if resid > 1e-6:
        raise DecompositionFailed(f"intertwining residual {resid:.3e} after construction")
    return a


def minimal_part(X, U, rtol=_RANK_RTOL):
    """Restrict (X, U) to the smallest reducing subspace containing ran X.

    Returns (X0, U0, subspace): the restricted pair and the orthonormal basis
    of K0 = span{U^k X H : k in Z^n} in the original coordinates.
    """
    dK = X.shape[0]
    if dK == 0 or not X.size or np.linalg.norm(X) == 0:
        U0 = OperatorTuple(tuple(np.zeros((0, 0), dtype=complex) for _ in U.mats))
        Q = np.zeros((dK, 0), dtype=complex)
        return np.zeros((0, X.shape[1]), dtype=complex), U0, Subspace(Q)
    Q = scipy.linalg.orth(X, rcond=rtol)
    while True:
        cols = [Q]
        for m in U.mats:
            cols.append(m @ Q)
            cols.append(m.conj().T @ Q)
        Qn = scipy.linalg.orth(np.hstack(cols), rcond=rtol)
        if Qn.shape[1] == Q.shape[1]:
            Q = Qn
            break
        Q = Qn
    X0 = Q.conj().T @ X
    U0 = validate_tuple([Q.conj().T @ m @ Q for m in U.mats], 1e-8)
    return X0, U0, Subspace(Q)


def annihilating_subspace(a, scan_horizon=8, rng=None):
    """(H0(T) = ker X, class label).

    Labels: ``C0dot`` when ker X is everything (0-type), ``C1dot`` when it is
    trivial on a nonzero space, ``Cstar`` otherwise (asymptotically
    non-vanishing with a nontrivial stable part).  A random vector of ker X
    is spot-checked for orbit decay across the scan box.
    """
    t = a.source
    kernel = tp._nullspace(a.X) if a.X.size else np.eye(t.dim, dtype=complex)
    if a.dim_K == 0:
        kernel = np.eye(t.dim, dtype=complex)
    sub = Subspace(kernel)
    if sub.dim == t.dim:
        label = "C0dot"
    elif sub.dim == 0:
        label = "C1dot"
    else:
        label = "Cstar"
    if sub.dim > 0 and t.dim > 0:
        rng = np.random.default_rng(rng)
        h = kernel @ (rng.standard_normal(sub.dim) + 1j * rng.standard_normal(sub.dim))
        far = tp.power(t, (scan_horizon,) * t.n) @ h
        if np.linalg.norm(far) > 0.9 * np.linalg.norm(h):
            warnings.warn("kernel vector does not visibly decay on the scan box")
    return sub, label


@dataclass(frozen=True)
class OrbitConditionReport:
    uoc_ok: bool
    uoc_margin: float          # max over samples of ||Xh|| - ||X|| * boxmin
    loc_kappa: float           # sup over samples of boxmin / ||Xh||
    loc_fails: bool
    samples: int
    horizon: int


def check_orbit_conditions(a, samples=20, horizon=10, rng=None, loc_ceiling=1e6):
    """Verify the upper orbit condition and estimate the lower orbit constant.

    The box minimum only upper-bounds the true orbit infimum, so a large
    ratio is evidence of LOC failure, not a proof.
    """
    t = a.source
    rng = np.random.default_rng(rng)
    Xnorm = a.X_norm
    worst_uoc = -np.inf
    kappa = 0.0
    loc_fails = False
    for _ in range(samples):
        h = rng.standard_normal(t.dim) + 1j * rng.standard_normal(t.dim)
        if np.linalg.norm(h) == 0:
            continue
        h /= np.linalg.norm(h)
        o = tp.orbit_infimum(t, h, horizon)
        xh = float(np.linalg.norm(a.X @ h)) if a.dim_K else 0.0
        worst_uoc = max(worst_uoc, xh - Xnorm * o)
        if xh > 1e-14:
            kappa = max(kappa, o / xh)
        elif o > 1e-12:
            loc_fails = True
            kappa = np.inf
    if kappa > loc_ceiling:
        loc_fails = True
    uoc_ok = worst_uoc <= 1e-8 * max(1.0, Xnorm)
    return OrbitConditionReport(uoc_ok, float(worst_uoc), float(kappa),
                                loc_fails, samples, horizon)


def _require_nondegenerate(a):
    if a.is_degenerate or a.X_norm == 0.0:
        raise ZeroX("the asymptote is degenerate (X = 0)")


def commutant_mapping(a, C, tol=1e-8):
    """The unique D in {U}' with X C = D X, for C in {T}'.

    ker X is hyperinvariant for T, so X C vanishes on ker X and the
    least-squares solve through the pseudo-inverse is exact.
    """
    _require_nondegenerate(a)
    t = a.source
    C = np.asarray(C, dtype=complex)
    for i, m in enumerate(t.mats):
        scale = max(np.linalg.norm(C, 2) * np.linalg.norm(m, 2), 1e-300)
        if np.linalg.norm(C @ m - m @ C, 2) / scale > tol:
            raise NotInCommutant(f"input does not commute with factor {i}")
    sv = np.linalg.svd(a.X, compute_uv=False)
    if sv[-1] <= _RANK_RTOL * sv[0]:
        raise NonUnique("X is not of full row rank; minimality is broken")
    D = a.X @ C @ np.linalg.pinv(a.X)
    resid = np.linalg.norm(D @ a.X - a.X @ C, 2)
    if resid > tol * max(1.0, np.linalg.norm(a.X @ C, 2)):
        raise NonUnique(f"no exact factorization (residual {resid:.3e})")
    for i, u in enumerate(a.U.mats):
        scale = max(np.linalg.norm(D, 2), 1e-300)
        if np.linalg.norm(D @ u - u @ D, 2) / scale > 1e-6:
            raise NonUnique(f"solution escapes the commutant of U (factor {i})")
    return D


@dataclass(frozen=True)
class NormControlReport:
    kappa_op_lower: float
    kappa_op_upper: float
    kappa_aop: float
    witness: np.ndarray          # Y' attaining the defining infimum
    block_margins: tuple         # per-atom smallest singular value of the block row
    descent_min: float           # cross-check from projected subgradient descent


def norm_control(a, blocks, restarts=3, rng=None, iters=200):
    """Optimal norm-control of the asymptote.

    {U}' is block diagonal over the joint eigenspaces of U, and
    inf{||Y'X|| : Y' in {U}', ||Y'|| = 1} is attained on a single block at
    the smallest singular value of that block row of X, so
    kappa_op = 1 / min_j sigma_min(P_j X) exactly.  A projected subgradient
    descent cross-check is reported alongside.
    """
    _require_nondegenerate(a)
    rng = np.random.default_rng(rng)
    bases = blocks.block_bases()
    rows = [q.conj().T @ a.X for q in bases]
    margins = []
    for xr in rows:
        sv = np.linalg.svd(xr, compute_uv=False)
        # min ||u^H X_j|| over unit u: zero when the block outranks the source
        margins.append(0.0 if xr.shape[0] > xr.shape[1] else float(sv[-1]))
    jstar = int(np.argmin(margins))
    smin = margins[jstar]
    if smin <= 0:
        raise NoFactorization("a block row of X is rank deficient; not universal")
    uvec = np.linalg.svd(rows[jstar])[0][:, -1]
    q = bases[jstar]
    witness = (q @ uvec)[:, None] @ (q @ uvec)[None, :].conj()

    descent = _descent_min(rows, restarts, rng, iters) if restarts else smin
    kappa = 1.0 / smin
    xnorm = a.X_norm
    return NormControlReport(
        kappa_op_lower=max(kappa, 1.0 / xnorm),
        kappa_op_upper=kappa,
        kappa_aop=xnorm * kappa,
        witness=witness,
        block_margins=tuple(margins),
        descent_min=float(descent),
    )


def _descent_min(rows, restarts, rng, iters):
    """min ||Y'X|| over ||Y'||=1 by projected subgradient descent on the blocks."""
    best = np.inf
    sizes = [r.shape[0] for r in rows]
    for _ in range(restarts):
        Bs = [rng.standard_normal((s, s)) + 1j * rng.standard_normal((s, s))
              for s in sizes]
        scale = max(np.linalg.norm(B, 2) for B in Bs)
        Bs = [B / scale for B in Bs]
        for it in range(iters):
            M = np.vstack([B @ r for B, r in zip(Bs, rows)])
            u, s, vh = np.linalg.svd(M)
            best = min(best, float(s[0]))
            step = 0.5 * (1.0 - it / iters) + 1e-3
            top_u, top_v = u[:, 0], vh[0].conj()
            off = 0
            grads = []
            for B, r in zip(Bs, rows):
                g = top_u[off : off + r.shape[0], None] @ (r @ top_v)[None, :].conj()
                grads.append(g)
                off += r.shape[0]
            Bs = [B - step * g for B, g in zip(Bs, grads)]
            scale = max(max(np.linalg.norm(B, 2) for B in Bs), 1e-300)
            Bs = [B / scale for B in Bs]
    return best


def check_equivalence(a1, a2, rtol=_RANK_RTOL, tol=1e-8):
    """Solve Z in I(U1, U2) with Z X1 = X2 and classify the relation.

    Returns (Z, verdict) with verdict 'equivalent' (Z unitary), 'similar'
    (Z invertible) or 'factors'.  Raises NoFactorization when no such Z
    exists within tolerance.
    """
    if a1.source.dim != a2.source.dim or a1.source.n != a2.source.n:
        raise ArityMismatch("asymptotes of different source tuples")
    if a1.dim_K == 0 and a2.dim_K == 0:
        return np.zeros((0, 0), dtype=complex), "equivalent"
    Z = a2.X @ np.linalg.pinv(a1.X, rcond=rtol)
    scale = max(a2.X_norm, 1e-300)
    if np.linalg.norm(Z @ a1.X - a2.X, 2) > tol * scale:
        raise NoFactorization("X2 does not factor through X1")
    for u1, u2 in zip(a1.U.mats, a2.U.mats):
        if np.linalg.norm(Z @ u1 - u2 @ Z, 2) > 1e-6 * max(np.linalg.norm(Z, 2), 1e-300):
            raise NoFactorization("solution does not intertwine the unitary tuples")
    if Z.shape[0] != Z.shape[1]:
        return Z, "factors"
    sv = np.linalg.svd(Z, compute_uv=False)
    if sv.size and sv[-1] > rtol * sv[0]:
        if np.linalg.norm(Z.conj().T @ Z - np.eye(Z.shape[1]), 2) <= 1e-8 * Z.shape[1]:
            return Z, "equivalent"
        return Z, "similar"
    return Z, "factors"


def transport_similarity(t, a, Z, tol=1e-8):
    """Asymptote of t transported through an invertible Z in I(t, a.source)."""
    Z = np.asarray(Z, dtype=complex)
    for m, m2 in zip(t.mats, a.source.mats):
        scale = max(np.linalg.norm(Z, 2) * np.linalg.norm(m, 2), 1e-300)
        if np.linalg.norm(Z @ m - m2 @ Z, 2) / scale > tol:
            raise NotIntertwining("Z does not intertwine the tuples")
    sv = np.linalg.svd(Z, compute_uv=False)
    if Z.shape[0] != Z.shape[1] or sv[-1] <= _RANK_RTOL * sv[0]:
        raise SingularFactor(0, "transport operator is not invertible")
    kappa = None
    if a.kappa_upper is not None:
        kappa = a.kappa_upper / sv[-1]          # kappa * ||Z^{-1}||
    return UnitaryAsymptote(t, a.X @ Z, a.U, "transport", loc_bound=None,
                            kappa_upper=kappa)


def asymptote_of_inverse(a, rtol=_RANK_RTOL):
    """(X, U^{-1}) as an asymptote of T^{-1}, plus the invertibility report.

    For power-bounded T, the transported pair satisfies the lower orbit
    condition iff X is invertible iff T is similar to a tuple of unitaries.
    """
    t_inv = tp.inverse_tuple(a.source, rtol)
    U_inv = a.U.adjoint()
    out = UnitaryAsymptote(t_inv, a.X, U_inv, a.method, loc_bound=None,
                           kappa_upper=a.kappa_upper, A=a.A)
    if a.X.size == 0:
        report = {"x_invertible": False, "x_condition": np.inf}
    else:
        sv = np.linalg.svd(a.X, compute_uv=False)
        square = a.X.shape[0] == a.X.shape[1]
        invertible = square and sv[-1] > rtol * sv[0]
        report = {
            "x_invertible": bool(invertible),
            "x_condition": float(sv[0] / sv[-1]) if sv[-1] > 0 else np.inf,
        }
    return out, report


def direct_sum_asymptote(a1, a2):
    """(X1 + X2, U1 + U2) blockwise, with norm-control sqrt(2) max(k1, k2)."""
    if a1.source.n != a2.source.n:
        raise ArityMismatch("arities differ")
    t = tp.direct_sum(a1.source, a2.source)
    X = np.zeros((a1.dim_K + a2.dim_K, a1.source.dim + a2.source.dim), dtype=complex)
    X[: a1.dim_K, : a1.source.dim] = a1.X
    X[a1.dim_K :, a1.source.dim :] = a2.X
    if a1.dim_K + a2.dim_K:
        U = tp.direct_sum(
            a1.U if a1.dim_K else _empty_tuple(a1.source.n),
            a2.U if a2.dim_K else _empty_tuple(a2.source.n),
        ) if (a1.dim_K and a2.dim_K) else (a1.U if a1.dim_K else a2.U)
    else:
        U = _empty_tuple(a1.source.n)
    kappa = None
    if a1.kappa_upper is not None and a2.kappa_upper is not None:
        kappa = float(np.sqrt(2) * max(a1.kappa_upper, a2.kappa_upper))
    loc = None
    if a1.loc_bound is not None and a2.loc_bound is not None:
        loc = max(a1.loc_bound, a2.loc_bound)
    return UnitaryAsymptote(t, X, U, "direct_sum", loc_bound=loc, kappa_upper=kappa)


def _empty_tuple(n):
    return OperatorTuple(tuple(np.zeros((0, 0), dtype=complex) for _ in range(n)))


def recover_summands(a, d1, rtol=_RANK_RTOL):
    """Project a joint asymptote of T1 + T2 back onto asymptotes of the summands.

    K_j is the reducing span of U^k X H_j; the restrictions (X_j, U|K_j) are
    unitary asymptotes of the summands.
    """
    t = a.source
    d = t.dim
    if not 0 <= d1 <= d:
        raise ArityMismatch(f"split point {d1} outside [0, {d}]")
    out = []
    for lo, hi in ((0, d1), (d1, d)):
        sub = validate_tuple([m[lo:hi, lo:hi] for m in t.mats], max(t.commute_tol, 1e-9))
        Xj_cols = a.X[:, lo:hi]
        X0, U0, _ = minimal_part(Xj_cols, a.U, rtol)
        out.append(UnitaryAsymptote(sub, X0, U0, "projected",
                                    loc_bound=a.loc_bound, kappa_upper=a.kappa_upper))
    return tuple(out)


def verify_universality(a, trials=6, rng=None, tol=1e-8):
    """Sample pairs (Y'X, U) with Y' in {U}' and verify unique recovery of Y'.

    Also checks the restriction identity on minimal parts and, for singular
    Y', the equivalence of the minimal parts of (Y'X, U) and (|Y'|X, U)
    through the polar decomposition.  Report only; never raises.
    """
    _require_nondegenerate(a)
    rng = np.random.default_rng(rng)
    comm = tp.commutant_basis(a.U)
    stack = np.stack([(b @ a.X).ravel() for b in comm.basis], axis=1)
    sv = np.linalg.svd(stack, compute_uv=False)
    unique = sv.size > 0 and sv[-1] > _RANK_RTOL * sv[0]
    results = []
    for trial in range(trials):
        coef = rng.standard_normal(comm.dim) + 1j * rng.standard_normal(comm.dim)
        Y = sum(c * b for c, b in zip(coef, comm.basis))
        if trial == trials - 1 and a.dim_K > 1:
            # force a rank-deficient sample for the polar-decomposition branch
            u, s, vh = np.linalg.svd(Y)
            s[-1] = 0.0
            Y = u @ np.diag(s) @ vh
        Xp = Y @ a.X
        sol, *_ = np.linalg.lstsq(stack, Xp.ravel(), rcond=None)
        Yrec = sum(c * b for c, b in zip(sol, comm.basis))
        rec_err = np.linalg.norm(Yrec - Y) / max(1.0, np.linalg.norm(Y))
        # Prop 2-style checks on the minimal parts
        Xp0, Up0, sub0 = minimal_part(Xp, a.U)
        P0 = sub0.basis @ sub0.basis.conj().T
        restr_err = np.linalg.norm(P0 @ Y - Y) / max(1.0, np.linalg.norm(Y))
        _, absY = scipy.linalg.polar(Y, side="left")
        Xa0, Ua0, _ = minimal_part(absY @ a.X, a.U)
        pair1 = UnitaryAsymptote(a.source, Xp0, Up0, "sampled")
        pair2 = UnitaryAsymptote(a.source, Xa0, Ua0, "sampled")
        try:
            _, verdict = check_equivalence(pair2, pair1)
        except NoFactorization:
            verdict = "none"
        results.append({
            "recovered": rec_err <= tol,
            "recovery_error": float(rec_err),
            "restriction_ok": restr_err <= 1e-6,
            "polar_verdict": verdict,
        })
    ok = unique and all(
        r["recovered"] and r["restriction_ok"] and r["polar_verdict"] == "equivalent"
        for r in results
    )
    return {"ok": ok, "unique_solve": unique, "trials": results}
