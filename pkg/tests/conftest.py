"""Shared corpus builders for the test suite.

Random power-bounded commuting tuples are built as S (D_u + D_s) S^{-1}
with a common similarity S of condition number <= 10, a diagonal unimodular
part with joint eigenvalues separated by at least 0.3 in max-coordinate
distance, and a stable part with spectral radius <= 0.75 (diagonal, or a
shared-Jordan-block perturbation).  The construction itself is the oracle:
the unimodular atoms, the stable subspace, and the exact limit operator are
all known in closed form.
"""

import numpy as np
import pytest

from uasym.tuples import OperatorTuple, validate_tuple


def random_similarity(rng, d, cond=10.0):
    """Random d x d matrix with condition number <= cond (exactly controlled)."""
    q1, _ = np.linalg.qr(rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)))
    q2, _ = np.linalg.qr(rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)))
    smax = np.sqrt(cond)
    sing = np.exp(rng.uniform(np.log(1 / smax), np.log(smax), size=d))
    sing[0], sing[-1] = smax, 1 / smax
    return q1 @ np.diag(sing) @ q2


def separated_atoms(rng, n, count, min_gap=0.3, max_tries=500):
    """Joint unimodular eigenvalues pairwise separated in max-coordinate distance."""
    atoms = []
    for _ in range(max_tries):
        z = np.exp(1j * rng.uniform(0, 2 * np.pi, size=n))
        if all(np.max(np.abs(z - w)) >= min_gap for w in atoms):
            atoms.append(z)
        if len(atoms) == count:
            return atoms
    raise RuntimeError("could not place separated atoms")


def random_power_bounded(rng, n=None, d=None, du=None, jordan_stable=True):
    """(tuple, oracle) with oracle = dict of the construction's ground truth."""
    n = n or int(rng.integers(1, 4))
    d = d or int(rng.integers(2, 13))
    if du is None:
        du = int(rng.integers(0, d + 1))
    ds = d - du
    n_atoms = int(rng.integers(1, du + 1)) if du else 0
    atoms = separated_atoms(rng, n, n_atoms) if n_atoms else []
    # spread the du unimodular directions over the atoms; each atom gets >= 1
    assign = (
        sorted(list(range(n_atoms)) + list(rng.integers(0, n_atoms, size=du - n_atoms)))
        if n_atoms
        else []
    )
    S = random_similarity(rng, d)
    Sinv = np.linalg.inv(S)
    mats = []
    J = np.diag(np.ones(ds - 1), 1) if ds > 1 else None
    use_jordan = jordan_stable and ds > 1 and rng.random() < 0.3
    for i in range(n):
        diag_u = np.array([atoms[a][i] for a in assign], dtype=complex)
        stable_diag = (
            rng.uniform(0.1, 0.75, size=ds)
            * np.exp(1j * rng.uniform(0, 2 * np.pi, size=ds))
        )
        Ds = np.diag(stable_diag)
        if use_jordan:
            # a polynomial in the shared nilpotent keeps the factors commuting
            Ds = stable_diag[0] * np.eye(ds) + rng.uniform(0.1, 0.5) * J
        D = np.zeros((d, d), dtype=complex)
        D[:du, :du] = np.diag(diag_u)
        D[du:, du:] = Ds
        mats.append(S @ D @ Sinv)
    t = validate_tuple(mats, 1e-8)
    oracle = {
        "S": S,
        "du": du,
        "atoms": atoms,
        "assign": assign,
        "unimodular_basis": S[:, :du],
        "stable_basis": S[:, du:],
    }
    return t, oracle


def principal_angle_gap(B1, B2):
    """max principal angle (radians) between equal-dimension column spans."""
    if B1.shape[1] != B2.shape[1]:
        return np.pi / 2
    if B1.shape[1] == 0:
        return 0.0
    q1, _ = np.linalg.qr(B1)
    q2, _ = np.linalg.qr(B2)
    sv = np.linalg.svd(q1.conj().T @ q2, compute_uv=False)
    return float(np.arccos(np.clip(sv.min(), -1.0, 1.0)))


@pytest.fixture
def rng():
    return np.random.default_rng(20260826)
