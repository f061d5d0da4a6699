"""Built-in worked examples, each returning a checkable report.

Every function returns a dict with a ``checks`` list of (label, passed,
detail) triples and an overall ``pass`` flag; the command-line front end
prints one PASS/FAIL line per check.
"""

from __future__ import annotations

import numpy as np

from . import asymptote as ay
from . import quasi as qa
from . import spectral as sp
from . import tuples as tp
from .arcs import ArcSet
from .errors import UnknownExample
from .hardy import ac_quasianalytic_check, build_toeplitz_model
from .shifts import build_weighted_shift, nonexistence_diagnostic
from .tuples import validate_tuple

__all__ = ["reproduce_example", "EXAMPLE_IDS"]

EXAMPLE_IDS = (9, 14, 17, 23, 26, 32)


def _report(name, checks, **extra):
    out = {"example": name, "checks": checks, "pass": all(ok for _, ok, _ in checks)}
    out.update(extra)
    return out


def example_9(tol=1e-6):
    """Jordan-type 2x2 operators where the explicit intertwiner Z has a large
    inverse while the optimal norm-control of the pair (Z, W) is exactly 1."""
    checks = []
    details = []
    for lam in (1j, np.exp(1j * np.pi / 4), -1.0 + 0j):
        T = validate_tuple([np.array([[lam, 0], [1, 1]], dtype=complex)])
        W = validate_tuple([np.diag([lam, 1.0]).astype(complex)])
        Z = np.array([[1, 0], [1 / (1 - lam), 1]], dtype=complex)
        a = ay.UnitaryAsymptote(T, Z, W, method="explicit")
        m = sp.joint_diagonalize(W)
        nc = ay.norm_control(a, m, restarts=1, rng=0)
        kappa = nc.kappa_op_upper
        z_inv_norm = float(np.linalg.norm(np.linalg.inv(Z), 2))
        lower = 1.0 / abs(1 - lam)
        details.append({"lambda": lam, "kappa_op": kappa, "Z_inv_norm": z_inv_norm,
                        "Z_inv_lower_bound": lower})
        checks.append((f"kappa_op(lambda={lam:.4f}) == 1",
                       abs(kappa - 1.0) <= tol, f"kappa_op={kappa:.09f}"))
        checks.append((f"||Z^-1||(lambda={lam:.4f}) >= 1/|1-lambda|",
                       z_inv_norm >= lower - 1e-12,
                       f"||Z^-1||={z_inv_norm:.6f} >= {lower:.6f}"))
    return _report("jordan-pair-optimal-norm-control", checks, details=details)


def example_14(N=16):
    """Doubled unilateral shift: quantified obstruction to a unitary asymptote."""
    rep = nonexistence_diagnostic(N)
    checks = [
        ("||R^k|| = 2^k exactly", rep.growth_exact,
         f"norms up to 2^{N} verified"),
        ("interior intertwining residual < 1e-12",
         max(rep.intertwine_residuals) < 1e-12,
         f"max residual {max(rep.intertwine_residuals):.2e}"),
        (f"Vandermonde rank = {N} for {N} circle points", rep.rank_full,
         f"rank {rep.vandermonde_rank}"),
        ("adjoint annihilation pattern (R*)^(j+1) e_j = 0",
         rep.adjoint_zero_pattern, "exact zeros"),
    ]
    return _report("doubled-shift-obstruction", checks, diagnostic=rep)


def example_17(rng=0):
    """Expanding invertible tuple: 0-type, yet orbit minima stay at ||h||."""
    t = validate_tuple([np.diag([2.0, 3.0j]), np.diag([2.0j, -2.0])])
    ks = [k for k in tp.box_indices(t.n, 2)] + [(-1, 0), (0, -1), (-1, -1)]
    rep = tp.spectral_radius_report(t, ks)
    zero_type = rep.verdict == "zero_type_certified"
    gen = np.random.default_rng(rng)
    orbit_ok = True
    for _ in range(10):
        h = gen.standard_normal(2) + 1j * gen.standard_normal(2)
        o = tp.orbit_infimum(t, h, 6)
        if abs(o - np.linalg.norm(h)) > 1e-10 * np.linalg.norm(h):
            orbit_ok = False
    checks = [
        ("0-type certified (some r(T^k) != 1 on an invertible tuple)",
         zero_type, f"radii {tuple(round(r, 3) for _, r in rep.radii)}"),
        ("orbit infimum equals ||h|| (common kernel of orbit limits is trivial)",
         orbit_ok, "10 random vectors, horizon 6"),
    ]
    return _report("expanding-tuple-loc-failure", checks, radii=rep.radii)


def example_23(windows=(8, 16), n=2):
    """Weighted bilateral shift pair: LOC with bound-control 1 for (X, U),
    catastrophic LOC failure for the inverse pair (X, U^-1)."""
    checks = []
    for N in windows:
        model = build_weighted_shift(n, N)
        h = model.basis_vector((1,) * n)
        horizon = N // 2
        o = tp.orbit_infimum(model.tuple, h, horizon)
        xh = float(np.linalg.norm(model.X @ h))
        checks.append((f"N={N}: interior LOC bound-control = 1 exactly",
                       o == xh == 1.0, f"orbit inf {o}, ||Xh|| {xh}"))
        tinv = model.inverse_on_window()
        hneg = model.basis_vector((-horizon,) * n)
        oinv = tp.orbit_infimum(tinv, hneg, horizon)
        ratio = oinv / float(np.linalg.norm(model.X @ hneg))
        checks.append((f"N={N}: LOC-for-inverse ratio > 2^(N/2)",
                       ratio > 2.0 ** (N / 2),
                       f"ratio {ratio:.1f} vs 2^{N // 2} = {2.0 ** (N / 2):.1f}"))
    return _report("weighted-shift-loc", checks)


def example_26(N=12):
    """Shift pair (S + S, I + 0) truncated at degree N: the commutant is the
    pair of triangular Toeplitz algebras, of dimension 2(N + 1)."""
    d = N + 1
    S = np.zeros((d, d), dtype=complex)
    for j in range(N):
        S[j + 1, j] = 1.0
    T1 = np.block([[S, np.zeros((d, d))], [np.zeros((d, d)), S]])
    T2 = np.block([[np.eye(d), np.zeros((d, d))], [np.zeros((d, d)), np.zeros((d, d))]])
    t = validate_tuple([T1, T2])
    comm = tp.commutant_basis(t)
    checks = [
        (f"dim of the commutant = 2(N+1) = {2 * d}", comm.dim == 2 * d,
         f"computed {comm.dim}")
    ]
    # hyperinvariant subspaces z^p H^2 (+) z^q H^2, truncated
    for p, q in ((1, 0), (2, 3)):
        basis = np.zeros((2 * d, (d - p) + (d - q)), dtype=complex)
        for j in range(d - p):
            basis[p + j, j] = 1.0
        for j in range(d - q):
            basis[d + q + j, (d - p) + j] = 1.0
        P = basis @ basis.conj().T
        resid = max(
            float(np.linalg.norm((np.eye(2 * d) - P) @ c @ basis, 2))
            for c in comm.basis
        )
        checks.append((f"z^{p} window (+) z^{q} window is commutant-invariant",
                       resid < 1e-8, f"residual {resid:.2e}"))
    return _report("shift-pair-commutant", checks)


def example_32(M=256, G=4096, samples=20, rng=0):
    """Arc-supported outer symbols: approximate quasianalyticity on the arc,
    and 0-type behavior for two symbols with disjoint arcs."""
    gen = np.random.default_rng(rng)
    model = build_toeplitz_model([ArcSet.from_arcs([(0.3, 1.8)])], M=M, G=G)
    checks = [
        ("eps(M) < 1e-3", max(model.eps) < 1e-3, f"eps = {max(model.eps):.2e}")
    ]
    worst = 0.0
    ok = True
    for _ in range(samples):
        f = gen.standard_normal(11) + 1j * gen.standard_normal(11)
        gap = abs(model.power_norm(f, (200,)) ** 2 - model.embedding_norm(f) ** 2)
        budget = 5 * model.quadrature_error(f, 200)
        worst = max(worst, gap / budget if budget else np.inf)
        ok &= gap <= budget
    checks.append((f"||T^k f|| -> ||Xf|| within 5x quadrature error by k=200 "
                   f"({samples} random polynomials)", ok,
                   f"worst gap/budget = {worst:.3f}"))
    rep = ac_quasianalytic_check(model, samples=50, rng=gen)
    checks.append(("pi_a = omega_a = Omega within one grid cell",
                   rep["within_one_cell"],
                   f"deviation {rep['deviation_cells']:.2f} cells"))
    two = build_toeplitz_model(
        [ArcSet.from_arcs([(0.3, 1.3)]), ArcSet.from_arcs([(2.3, 3.3)])], M=M, G=G
    )
    h = gen.standard_normal(11) + 1j * gen.standard_normal(11)
    val = two.power_norm(h, (400, 400))
    checks.append(("disjoint arcs: ||T1^j T2^j h|| < 1e-3 by j = 400",
                   val < 1e-3, f"norm {val:.2e}"))
    return _report("arc-symbol-toeplitz", checks)


def reproduce_example(example_id, **kwargs):
    """Dispatch on the built-in example identifiers (9, 14, 17, 23, 26, 32)."""
    table = {9: example_9, 14: example_14, 17: example_17, 23: example_23,
             26: example_26, 32: example_32}
    try:
        fn = table[int(example_id)]
    except (KeyError, ValueError):
        raise UnknownExample(f"unknown example id {example_id!r}; "
                             f"known ids: {EXAMPLE_IDS}") from None
    return fn(**kwargs)
