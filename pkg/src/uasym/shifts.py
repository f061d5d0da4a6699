"""Windowed weighted bilateral shifts and shift-based diagnostics.

The weighted shift tuple acts on the window [-N, N]^n of the integer
lattice with weights beta(k) = 2^{-sum_i min(0, k_i)}; in the orthonormal
weighted basis the shifts are contractions with entries beta(k)/beta(k-e_i)
in {1, 1/2}.  For vectors supported in the half-size interior box and
horizons up to N/2, the truncation agrees with the infinite lattice
exactly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import WindowTooSmall
from .tuples import OperatorTuple, validate_tuple

__all__ = ["WeightedShiftModel", "build_weighted_shift", "nonexistence_diagnostic"]


def log2_beta(k):
    """log2 of the weight: -sum_i min(0, k_i); zero on the positive cone."""
    return -sum(min(0, ki) for ki in k)


@dataclass(frozen=True)
class WeightedShiftModel:
    """Shift tuple T on the beta-weighted window, its unitary model U on the
    unweighted window (cyclic shifts), and the embedding X = diag(1/beta)."""

    n: int
    N: int
    tuple: OperatorTuple          # T, in the weighted orthonormal basis
    unitary: OperatorTuple        # U, cyclic bilateral shifts
    X: np.ndarray                 # diagonal embedding into the unweighted window
    indices: tuple                # lattice points, in basis order

    @property
    def dim(self):
        return (2 * self.N + 1) ** self.n

    @property
    def interior_radius(self):
        return self.N // 2

    def index_of(self, k):
        side = 2 * self.N + 1
        pos = 0
        for ki in k:
            if not -self.N <= ki <= self.N:
                raise WindowTooSmall(f"lattice point {k} outside the window")
            pos = pos * side + (ki + self.N)
        return pos

    def basis_vector(self, k):
        """The weighted orthonormal basis vector f_k = delta_k / beta(k)."""
        v = np.zeros(self.dim, dtype=complex)
        v[self.index_of(k)] = 1.0
        return v

    def inverse_on_window(self):
        """Matrix of T^{-1} (the backward shift) with zero boundary fill.

        The windowed T is not invertible; this is the infinite-lattice
        inverse restricted to the window, exact on interior vectors.
        """
        mats = []
        for i in range(self.n):
            m = np.zeros((self.dim, self.dim))
            for k in self.indices:
                tgt = list(k)
                tgt[i] -= 1
                if tgt[i] < -self.N:
                    continue
                # T^{-1} f_k = (beta(k - e_i)/beta(k)) f_{k - e_i}
                m[self.index_of(tuple(tgt)), self.index_of(k)] = 2.0 ** (
                    log2_beta(tgt) - log2_beta(k)
                )
            mats.append(m)
        return validate_tuple(mats, 1e-12)


def build_weighted_shift(n, N):
    """Windowed model of the weighted shift tuple; exact on the interior.

    T_i moves lattice coordinate i forward with weight ratio
    beta(k)/beta(k-e_i) <= 1; U_i is the cyclic bilateral shift on the
    unweighted window; X is the diagonal embedding f_k -> delta_k/beta(k).
    """
    if N < 2:
        raise WindowTooSmall(f"window radius {N} < 2")
    side = 2 * N + 1
    dim = side**n
    indices = tuple(itertools.product(range(-N, N + 1), repeat=n))
    t_mats = []
    u_mats = []
    for i in range(n):
        tm = np.zeros((dim, dim))
        um = np.zeros((dim, dim))
        for pos, k in enumerate(indices):
            tgt = list(k)
            tgt[i] += 1
            wrapped = tuple(
                ki - side if ki > N else ki for ki in tgt
            )
            tgt_pos = _flat(wrapped, N, side)
            um[tgt_pos, pos] = 1.0
            if tgt[i] <= N:
                # T f_k = (beta(k + e_i)/beta(k)) f_{k + e_i}
                tm[tgt_pos, pos] = 2.0 ** (log2_beta(tgt) - log2_beta(k))
        t_mats.append(tm)
        u_mats.append(um)
    X = np.diag([2.0 ** (-log2_beta(k)) for k in indices]).astype(complex)
    return WeightedShiftModel(
        n, N,
        validate_tuple(t_mats, 1e-12),
        validate_tuple(u_mats, 1e-12),
        X, indices,
    )


def _flat(k, N, side):
    pos = 0
    for ki in k:
        pos = pos * side + (ki + N)
    return pos


@dataclass(frozen=True)
class NonexistenceReport:
    """Quantified obstruction to a unitary asymptote for R = 2 * shift."""

    N: int
    power_norms: tuple            # ||R^k|| for k = 0..N
    growth_exact: bool            # ||R^k|| == 2^k
    lambda_grid: tuple
    intertwine_residuals: tuple   # interior residual of X_lam R = lam X_lam
    vandermonde_rank: int
    rank_full: bool
    adjoint_zero_pattern: bool    # (R*)^{j+1} e_j = 0 for all j
    obstruction: str


def nonexistence_diagnostic(N=16, grid=None):
    """Report the separability obstruction for R = 2 * (unilateral shift).

    Each lambda on the circle yields a rank-one intertwiner X_lam with
    X_lam R = lam X_lam on the interior coordinates; the stacked X_lam rows
    form a full-rank Vandermonde family, so a minimal unitary asymptote
    would need one orthogonal eigenspace per grid point — unboundedly many.
    The adjoint is of 0-type: (R*)^{j+1} annihilates e_j.
    """
    if N < 4:
        raise WindowTooSmall(f"truncation degree {N} < 4")
    d = N + 1
    R = np.zeros((d, d))
    for j in range(N):
        R[j + 1, j] = 2.0
    powers = []
    mat = np.eye(d)
    for k in range(N + 1):
        powers.append(float(np.linalg.norm(mat, 2)))
        mat = R @ mat
    growth_exact = all(abs(p - 2.0**k) < 1e-9 * 2.0**k for k, p in enumerate(powers))

    if grid is None:
        grid = d - 1
    lams = tuple(np.exp(2j * np.pi * g / grid) for g in range(grid))
    rows = []
    residuals = []
    for lam in lams:
        x = np.array([2.0 ** (-j) * lam**j for j in range(d)])
        rows.append(x)
        interior = (x @ R - lam * x)[: d - 1]      # last coordinate is truncation
        residuals.append(float(np.linalg.norm(interior)))
    stack = np.stack(rows)
    sv = np.linalg.svd(stack, compute_uv=False)
    rank = int(np.sum(sv > 1e-8 * sv[0]))

    Rh = R.conj().T
    zero_pattern = True
    for j in range(d):
        e = np.zeros(d)
        e[j] = 1.0
        zero_pattern &= float(np.linalg.norm(np.linalg.matrix_power(Rh, j + 1) @ e)) == 0.0

    return NonexistenceReport(
        N, tuple(powers), growth_exact, lams, tuple(residuals), rank,
        rank == len(lams), zero_pattern,
        f"a minimal unitary asymptote would need >= {rank} orthogonal "
        f"eigenspaces from {len(lams)} circle points; the bound grows "
        f"without limit as the grid is refined, while ||R^k|| = 2^k "
        f"rules out power boundedness",
    )
