"""Joint spectral analysis of commuting unitary tuples.

A commuting tuple of unitaries on a finite-dimensional space is jointly
diagonalizable; its spectral measure is purely atomic.  This module computes
the atoms and orthogonal spectral projections, localizations at vectors,
scalar spectral vectors, the block structure of the commutant, the atomic
functional calculus, and the Boolean lattice of atom sets.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ArityMismatch,
    ClusterAmbiguity,
    DimMismatch,
    EmptySpace,
    MeasureMismatch,
    NotUnitary,
)

__all__ = [
    "AtomicSpectralMeasure",
    "AtomSet",
    "LocalMeasure",
    "joint_diagonalize",
    "localize",
    "local_residual_set",
    "scalar_spectral_vector",
    "unitary_commutant_blocks",
    "functional_calculus",
    "atomset_join",
    "atomset_meet",
    "atomset_complement",
]


@dataclass(frozen=True)
class AtomSet:
    """Subset of the atoms of a fixed atomic spectral measure, as a bitmask.

    The essential ordering of Borel sets modulo the measure collapses to
    plain Boolean set algebra on atoms, so containment and equality
    predicates are exact.
    """

    mask: int
    size: int

    def __post_init__(self):
        if self.size < 0 or self.mask < 0 or self.mask >= (1 << self.size):
            raise MeasureMismatch("atom indices out of range")

    @classmethod
    def from_indices(cls, indices, size):
        mask = 0
        for j in indices:
            if not 0 <= j < size:
                raise MeasureMismatch(f"atom index {j} out of range [0, {size})")
            mask |= 1 << j
        return cls(mask, size)

    @classmethod
    def full(cls, size):
        return cls((1 << size) - 1, size)

    @classmethod
    def empty(cls, size):
        return cls(0, size)

    @property
    def indices(self):
        return tuple(j for j in range(self.size) if self.mask >> j & 1)

    def _check(self, other):
        if self.size != other.size:
            raise MeasureMismatch("atom sets over different measures")

    def join(self, other):
        self._check(other)
        return AtomSet(self.mask | other.mask, self.size)

    def meet(self, other):
        self._check(other)
        return AtomSet(self.mask & other.mask, self.size)

    def complement(self):
        return AtomSet(self.mask ^ (1 << self.size) - 1, self.size)

    def contained_e(self, other):
        """Essential containment: E(self \\ other) = 0, i.e. bitset containment."""
        self._check(other)
        return self.mask & ~other.mask == 0

    def equal_e(self, other):
        self._check(other)
        return self.mask == other.mask

    @property
    def is_full(self):
        return self.mask == (1 << self.size) - 1

    @property
    def is_empty(self):
        return self.mask == 0

    def __len__(self):
        return int(self.mask).bit_count()

    def __or__(self, other):
        return self.join(other)

    def __and__(self, other):
        return self.meet(other)

    def __invert__(self):
        return self.complement()


def atomset_join(sets, size=None):
    """Join of an arbitrary finite family; empty family yields the empty set."""
    sets = list(sets)
    if not sets:
        if size is None:
            raise MeasureMismatch("empty family requires an explicit size")
        return AtomSet.empty(size)
    out = sets[0]
    for s in sets[1:]:
        out = out.join(s)
    return out


def atomset_meet(sets, size=None):
    """Meet of an arbitrary finite family; empty family yields the full set."""
    sets = list(sets)
    if not sets:
        if size is None:
            raise MeasureMismatch("empty family requires an explicit size")
        return AtomSet.full(size)
    out = sets[0]
    for s in sets[1:]:
        out = out.meet(s)
    return out


def atomset_complement(s):
    return s.complement()


@dataclass(frozen=True)
class AtomicSpectralMeasure:
    """Atoms z_j in T^n with orthogonal spectral projections P_j summing to I."""

    atoms: tuple          # of ndarray, shape (n,), unimodular coordinates
    projections: tuple    # of ndarray, d_K x d_K
    cluster_tol: float = 1e-7
    _bases: tuple = field(default=None, compare=False, repr=False)

    @property
    def n_atoms(self):
        return len(self.atoms)

    @property
    def n(self):
        return len(self.atoms[0]) if self.atoms else 0

    @property
    def dim(self):
        return self.projections[0].shape[0] if self.projections else 0

    @property
    def multiplicities(self):
        return tuple(q.shape[1] for q in self.block_bases())

    def block_bases(self):
        """Orthonormal bases of the ranges of the spectral projections."""
        if self._bases is not None:
            return self._bases
        bases = []
        for p in self.projections:
            w, v = np.linalg.eigh(p)
            bases.append(v[:, w > 0.5])
        bases = tuple(bases)
        object.__setattr__(self, "_bases", bases)
        return bases

    def projection(self, omega):
        """E(omega) = sum of P_j over the atom set."""
        if omega.size != self.n_atoms:
            raise MeasureMismatch("atom set over a different measure")
        E = np.zeros((self.dim, self.dim), dtype=complex)
        for j in omega.indices:
            E += self.projections[j]
        return E

    def reconstruction_residual(self, u):
        out = 0.0
        for i, m in enumerate(u.mats):
            rec = sum(z[i] * p for z, p in zip(self.atoms, self.projections))
            out = max(out, float(np.linalg.norm(m - rec, 2)))
        return out

    def verify(self, tol=1e-9):
        d = self.dim
        total = sum(self.projections)
        assert np.linalg.norm(total - np.eye(d), 2) < tol
        for j, p in enumerate(self.projections):
            assert np.linalg.norm(p @ p - p, 2) < tol
            assert np.linalg.norm(p - p.conj().T, 2) < tol
            for l in range(j):
                assert np.linalg.norm(p @ self.projections[l], 2) < tol


@dataclass(frozen=True)
class LocalMeasure:
    """Localization E_y: the atomic measure with weights ||P_j y||^2."""

    weights: np.ndarray
    owner: np.ndarray

    @property
    def total_mass(self):
        return float(np.sum(self.weights))

    def support(self, support_tol=1e-10):
        scale = float(self.owner.conj() @ self.owner).real
        idx = np.nonzero(self.weights > support_tol * max(scale, 1e-300))[0]
        return AtomSet.from_indices(idx.tolist(), len(self.weights))

    def dominated_by(self, other, support_tol=1e-10):
        """Absolute continuity of atomic measures = support containment."""
        return self.support(support_tol).contained_e(other.support(support_tol))

    def equivalent_to(self, other, support_tol=1e-10):
        return self.support(support_tol).equal_e(other.support(support_tol))


def _cluster_1d(values, tol):
    order = list(range(len(values)))
    groups = []
    while order:
        seed = order.pop(0)
        group = [seed]
        changed = True
        while changed:
            changed = False
            for idx in order[:]:
                if any(abs(values[idx] - values[g]) <= tol for g in group):
                    group.append(idx)
                    order.remove(idx)
                    changed = True
        groups.append(sorted(group))
    return groups


def joint_diagonalize(u, cluster_tol=1e-7):
    """Atoms and spectral projections of a commuting unitary tuple.

    Diagonalizes U_1, then recursively diagonalizes the restrictions of
    U_2, ..., U_n to each eigenspace (the restrictions are again commuting
    unitaries); joint eigenvalues are clustered at cluster_tol per
    coordinate.
    """
    d = u.dim
    for i, m in enumerate(u.mats):
        resid = float(np.linalg.norm(m.conj().T @ m - np.eye(d), 2))
        if resid > 1e-8:
            raise NotUnitary(i, resid)
    spaces = [(np.eye(d, dtype=complex), ())]
    for m in u.mats:
        refined = []
        for V, zs in spaces:
            R = V.conj().T @ (m @ V)
            # R is (numerically) unitary, hence normal: eigh of the Hermitian
            # and anti-Hermitian parts is avoided by Schur, which is exact
            # for normal matrices and returns an orthonormal basis
            w = np.linalg.eigvals(R)
            groups = _cluster_1d(w, cluster_tol)
            for g in groups:
                z = complex(np.mean(w[g]))
                z /= abs(z)
                if len(g) == R.shape[0]:
                    refined.append((V, zs + (z,)))
                else:
                    Q = _unitary_eigenspace(R, w[g], cluster_tol)
                    refined.append((V @ Q, zs + (z,)))
        spaces = refined
    atoms = [np.array(zs) for _, zs in spaces]
    for j in range(len(atoms)):
        for l in range(j):
            if np.max(np.abs(atoms[j] - atoms[l])) <= 2 * cluster_tol:
                raise ClusterAmbiguity(
                    f"atoms {atoms[l]} and {atoms[j]} are within twice the "
                    f"clustering tolerance {cluster_tol:.1e}"
                )
    projections = tuple(V @ V.conj().T for V, _ in spaces)
    m_out = AtomicSpectralMeasure(tuple(atoms), projections, cluster_tol,
                                  tuple(V for V, _ in spaces))
    resid = m_out.reconstruction_residual(u)
    if resid > 1e-8:
        raise ClusterAmbiguity(f"reconstruction residual {resid:.3e} after clustering")
    return m_out


def _unitary_eigenspace(R, group_eigs, tol):
    import scipy.linalg

    def select(z):
        return bool(np.min(np.abs(z - group_eigs)) <= 4 * tol)

    T, Z, sdim = scipy.linalg.schur(R, output="complex", sort=select)
    return Z[:, :sdim]


def localize(m, y):
    """The local measure E_y with weights ||P_j y||^2."""
    y = np.asarray(y, dtype=complex)
    if y.shape != (m.dim,):
        raise DimMismatch(f"vector of length {y.shape} in a dim-{m.dim} space")
    weights = np.array([float(np.linalg.norm(p @ y) ** 2) for p in m.projections])
    return LocalMeasure(weights, y)


def local_residual_set(m, y, support_tol=1e-10):
    """Smallest atom set omega with E(omega) y = y: the support of E_y."""
    return localize(m, y).support(support_tol)


def scalar_spectral_vector(m):
    """A vector y whose localization has full support: y = sum_j 2^{-j} u_j
    with u_j a unit vector in the j-th spectral subspace."""
    if m.dim == 0 or m.n_atoms == 0:
        raise EmptySpace("the measure has no atoms")
    y = np.zeros(m.dim, dtype=complex)
    for j, q in enumerate(m.block_bases()):
        y += 2.0 ** (-(j + 1)) * q[:, 0]
    return y


@dataclass(frozen=True)
class CommutantBlocks:
    """{U}' as the direct sum of full matrix algebras on the spectral subspaces."""

    bases: tuple          # per-atom orthonormal bases Q_j
    dim: int              # sum of (rank P_j)^2

    def basis_matrices(self):
        """Matrix units of the block-diagonal algebra, as full-size matrices."""
        out = []
        for q in self.bases:
            r = q.shape[1]
            for a in range(r):
                for b in range(r):
                    out.append(q[:, a : a + 1] @ q[:, b : b + 1].conj().T)
        return out


def unitary_commutant_blocks(m):
    bases = m.block_bases()
    return CommutantBlocks(bases, sum(q.shape[1] ** 2 for q in bases))


def functional_calculus(m, g):
    """g(U) = sum_j g(z_j) P_j for per-atom values g."""
    g = np.asarray(g, dtype=complex)
    if g.shape != (m.n_atoms,):
        raise ArityMismatch(f"expected {m.n_atoms} values, got {g.shape}")
    out = np.zeros((m.dim, m.dim), dtype=complex)
    for val, p in zip(g, m.projections):
        out += val * p
    return out
