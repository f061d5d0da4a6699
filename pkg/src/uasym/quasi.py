"""Quasianalyticity of commuting tuples through their unitary asymptotes.

The local residual set of T at h is the support of the localization of the
asymptote's spectral measure at Xh.  T is quasianalytic when all these sets
essentially coincide with the full spectrum; when they do not, homogeneity
breaks and a proper hyperinvariant subspace can be pulled back through X.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import spectral as sp
from . import tuples as tp
from .errors import (
    CriteriaDisagree,
    DimMismatch,
    InvarianceCheckFailed,
    IsQuasianalytic,
    NoSplittingAtom,
    NotInjective,
    NotIntertwining,
    ZeroX,
)
from .spectral import AtomSet
from .tuples import Subspace

__all__ = [
    "local_residual_T",
    "quasianalytic_set",
    "is_quasianalytic",
    "QuasiEvidence",
    "hyperinvariant_pullback",
    "split_non_quasianalytic",
    "unitary_injection_test",
]

_RANK_RTOL = 1e-8


def local_residual_T(a, m, h, support_tol=1e-10):
    """omega(T, h): the support of the localization of E at Xh."""
    h = np.asarray(h, dtype=complex)
    if h.shape != (a.source.dim,):
        raise DimMismatch(f"vector of shape {h.shape} for a dim-{a.source.dim} tuple")
    return sp.local_residual_set(m, a.X @ h, support_tol)


def _block_margins(a, m):
    """Per-atom injectivity margin of P_j X as a map on H.

    The kernel of P_j X is trivial iff the block row has full column rank;
    a block with fewer rows than H has dimension can never be injective, so
    its margin is 0.
    """
    margins = []
    for q in m.block_bases():
        xr = q.conj().T @ a.X
        sv = np.linalg.svd(xr, compute_uv=False)
        margins.append(0.0 if xr.shape[0] < xr.shape[1] else float(sv[-1]))
    return margins


def quasianalytic_set(a, m, rank_rtol=_RANK_RTOL, cross_check=0, rng=None):
    """pi(T): the meet of omega(T, h) over all nonzero h, evaluated exactly.

    Atom j survives every local residual set iff P_j X h != 0 for every
    h != 0, i.e. iff P_j X has trivial kernel; the meet over uncountably
    many h collapses to a per-atom kernel test.
    """
    margins = _block_margins(a, m)
    scale = max(a.X_norm, 1e-300)
    idx = [j for j, s in enumerate(margins) if s > rank_rtol * scale]
    pi = AtomSet.from_indices(idx, m.n_atoms)
    if cross_check:
        rng = np.random.default_rng(rng)
        d = a.source.dim
        for _ in range(cross_check):
            h = rng.standard_normal(d) + 1j * rng.standard_normal(d)
            assert pi.contained_e(local_residual_T(a, m, h))
    return pi


@dataclass(frozen=True)
class QuasiEvidence:
    pi_full: bool                 # (i) pi(T) is the full atom set
    cyclic_ok: bool               # (ii) Xh cyclic for {U}' on the sampled family
    nonvanishing_ok: bool         # (iii) P_j X h != 0 for all atoms, same family
    pi: AtomSet
    block_margins: tuple
    kernel_ok: bool               # ker X = {0} (consequence when quasianalytic)
    family_size: int


def _witness_family(a, m, extra_random, rng):
    """Basis of H, plus kernel vectors of each defective block, plus noise.

    Including a kernel vector of every rank-deficient P_j X makes the sampled
    criteria (ii)/(iii) agree with the exact kernel criterion (i): any
    defective atom is exhibited by a concrete h rather than left to chance.
    """
    d = a.source.dim
    fam = [e for e in np.eye(d, dtype=complex)]
    for q in m.block_bases():
        xr = q.conj().T @ a.X
        ker = tp._nullspace(xr)
        for col in ker.T:
            fam.append(col)
    rng = np.random.default_rng(rng)
    for _ in range(extra_random):
        fam.append(rng.standard_normal(d) + 1j * rng.standard_normal(d))
    return [h / np.linalg.norm(h) for h in fam if np.linalg.norm(h) > 0]


def is_quasianalytic(a, m, rank_rtol=_RANK_RTOL, samples=8, rng=None):
    """Three-way quasianalyticity test with agreement assertion.

    (i) pi(T) is the full atom set; (ii) for each h in a certified family,
    {D X h : D in a basis of {U}'} spans K; (iii) every spectral projection
    is nonzero on Xh for each h in the family.  The three criteria are
    provably equivalent; CriteriaDisagree signals a numerical rank
    misjudgment and is never masked.
    """
    if a.is_degenerate or a.X_norm == 0.0:
        raise ZeroX("quasianalyticity is undefined for a degenerate asymptote")
    margins = _block_margins(a, m)
    pi = quasianalytic_set(a, m, rank_rtol)
    crit_i = pi.is_full

    blocks = sp.unitary_commutant_blocks(m)
    units = blocks.basis_matrices()
    fam = _witness_family(a, m, samples, rng)
    scale = max(a.X_norm, 1e-300)
    crit_ii = True
    crit_iii = True
    for h in fam:
        xh = a.X @ h
        span = np.stack([d_ @ xh for d_ in units], axis=1)
        sv = np.linalg.svd(span, compute_uv=False)
        rank = int(np.sum(sv > rank_rtol * scale))
        if rank < a.dim_K:
            crit_ii = False
        for p in m.projections:
            if np.linalg.norm(p @ xh) <= rank_rtol * scale:
                crit_iii = False
    if not (crit_i == crit_ii == crit_iii):
        raise CriteriaDisagree(
            f"pi-full={crit_i}, cyclicity={crit_ii}, non-vanishing={crit_iii}"
        )
    sv = np.linalg.svd(a.X, compute_uv=False)
    kernel_ok = a.X.shape[1] <= a.X.shape[0] and sv[-1] > rank_rtol * sv[0]
    evidence = QuasiEvidence(crit_i, crit_ii, crit_iii, pi, tuple(margins),
                             kernel_ok, len(fam))
    if crit_i and not kernel_ok:
        raise CriteriaDisagree("quasianalytic verdict with nontrivial ker X")
    return crit_i, evidence


def hyperinvariant_pullback(a, m, omega, rank_rtol=_RANK_RTOL, tol=1e-8):
    """M = X^{-1}(E(omega) K) = ker((I - E(omega)) X), hyperinvariant for T.

    The invariance certificate checks C M within M for a full basis of the
    commutant of T.
    """
    E = m.projection(omega)
    rest = (np.eye(a.dim_K) - E) @ a.X
    if np.linalg.norm(rest) <= rank_rtol * max(a.X_norm, 1e-300):
        basis = np.eye(a.source.dim, dtype=complex)
    else:
        basis = tp._nullspace(rest, rank_rtol)
    sub = Subspace(basis)
    comm = tp.commutant_basis(a.source)
    P = basis @ basis.conj().T
    for c in comm.basis:
        resid = np.linalg.norm((np.eye(a.source.dim) - P) @ c @ basis, 2)
        if resid > tol * max(np.linalg.norm(c, 2), 1e-300):
            raise InvarianceCheckFailed(
                f"commutant element escapes the pullback (residual {resid:.3e})"
            )
    return sub


def split_non_quasianalytic(t, a, m, rank_rtol=_RANK_RTOL):
    """A proper hyperinvariant subspace of a non-quasianalytic tuple with X != 0.

    Returns (M, witnesses): either ker X when it is proper, or the pullback
    of the spectral complement of a defective atom z, with u, v such that
    the localization of X u charges z while the localization of X v does not.
    """
    if a.is_degenerate or a.X_norm == 0.0:
        raise ZeroX("the asymptote is degenerate")
    verdict, _ = is_quasianalytic(a, m, rank_rtol)
    if verdict:
        raise IsQuasianalytic("the tuple is quasianalytic; no split available")
    sv = np.linalg.svd(a.X, compute_uv=False)
    kerX = tp._nullspace(a.X, rank_rtol)
    if 0 < kerX.shape[1] < t.dim:
        sub = Subspace(kerX)
        witnesses = {"kind": "annihilator", "v": kerX[:, 0]}
        return sub, witnesses
    # find the defective atom with the largest kernel of P_z X
    best = None
    for j, q in enumerate(m.block_bases()):
        xr = q.conj().T @ a.X
        if np.linalg.norm(xr) <= rank_rtol * max(a.X_norm, 1e-300):
            continue                       # P_z X = 0: no vector u to charge z
        ker = tp._nullspace(xr, rank_rtol)
        if ker.shape[1] and (best is None or ker.shape[1] > best[1].shape[1]):
            best = (j, ker, xr)
    if best is None:
        raise NoSplittingAtom("no atom with nonzero, non-injective P_z X found")
    j, ker, xr = best
    omega2 = AtomSet.from_indices([j], m.n_atoms).complement()
    M = hyperinvariant_pullback(a, m, omega2, rank_rtol)
    v = ker[:, 0]
    # u: any vector with P_z X u != 0 — take the top right singular vector
    u = np.linalg.svd(xr)[2][0].conj()
    if not M.contains(v) or M.contains(u) or M.dim in (0, t.dim):
        raise NoSplittingAtom("witness certificate failed; rank thresholds suspect")
    witnesses = {"kind": "spectral", "atom": j, "u": u, "v": v, "omega2": omega2}
    return M, witnesses


def unitary_injection_test(t, u2, Y, rank_rtol=_RANK_RTOL, tol=1e-8):
    """Non-quasianalyticity from an injectively embedded unitary tuple.

    Given unitary u2 and injective Y with T_i Y = Y U2_i, a u2-spectrum of
    at least two atoms produces two vectors whose local residual sets are
    disjoint, hence T is not quasianalytic.  Returns a dict verdict report.
    """
    Y = np.asarray(Y, dtype=complex)
    sv = np.linalg.svd(Y, compute_uv=False)
    if sv[-1] <= rank_rtol * sv[0]:
        raise NotInjective("the embedding is not injective")
    for i, (ti, ui) in enumerate(zip(t.mats, u2.mats)):
        scale = max(np.linalg.norm(Y, 2) * np.linalg.norm(ti, 2), 1e-300)
        if np.linalg.norm(ti @ Y - Y @ ui, 2) / scale > tol:
            raise NotIntertwining(f"Y does not intertwine factor {i}")
    m2 = sp.joint_diagonalize(u2)
    if m2.n_atoms < 2:
        return {"verdict": "inconclusive", "atoms": m2.n_atoms}
    v1 = m2.block_bases()[0][:, 0]
    v2 = m2.block_bases()[1][:, 0]
    return {
        "verdict": "not_quasianalytic",
        "atoms": m2.n_atoms,
        "witnesses": (Y @ v1, Y @ v2),
        "witness_atoms": (m2.atoms[0], m2.atoms[1]),
    }
