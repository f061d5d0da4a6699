"""Finite unions of arcs on the unit circle with exact endpoint arithmetic.

Arcs are half-open angle intervals; a set is kept in canonical form as a
sorted tuple of disjoint, non-touching intervals inside [0, 2*pi).  The
normalized Lebesgue measure, Boolean lattice operations, and the essential
containment predicate (measure of the difference below a grid tolerance)
are all closed-form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["ArcSet", "TAU"]

TAU = 2 * np.pi


def _canonical(intervals):
    """Merge overlapping/touching intervals inside [0, TAU)."""
    ivs = sorted((float(a), float(b)) for a, b in intervals if b > a)
    out = []
    for a, b in ivs:
        if out and a <= out[-1][1] + 1e-15:
            out[-1][1] = max(out[-1][1], b)
        else:
            out.append([a, b])
    return tuple((a, b) for a, b in out)


@dataclass(frozen=True)
class ArcSet:
    """Disjoint arcs on the circle, as angle intervals in [0, 2*pi)."""

    arcs: tuple

    @classmethod
    def from_arcs(cls, pairs):
        """Build from (start, end) angle pairs; end < start wraps through 0."""
        ivs = []
        for a, b in pairs:
            a = float(a) % TAU
            b = float(b) % TAU
            if np.isclose(a, b):
                continue
            if b > a:
                ivs.append((a, b))
            else:
                ivs.append((a, TAU))
                if b > 0:
                    ivs.append((0.0, b))
        return cls(_canonical(ivs))

    @classmethod
    def full(cls):
        return cls(((0.0, TAU),))

    @classmethod
    def empty(cls):
        return cls(())

    @property
    def measure(self):
        """Normalized Lebesgue measure in [0, 1]."""
        return sum(b - a for a, b in self.arcs) / TAU

    def contains_point(self, theta):
        theta = float(theta) % TAU
        return any(a <= theta < b for a, b in self.arcs)

    def join(self, other):
        return ArcSet(_canonical(self.arcs + other.arcs))

    def complement(self):
        out = []
        prev = 0.0
        for a, b in self.arcs:
            if a > prev:
                out.append((prev, a))
            prev = b
        if prev < TAU:
            out.append((prev, TAU))
        return ArcSet(_canonical(out))

    def meet(self, other):
        # De Morgan keeps the sweep logic in one place (complement + join)
        return self.complement().join(other.complement()).complement()

    def minus(self, other):
        return self.meet(other.complement())

    def contained_e(self, other, tol=1e-12):
        """Essential containment: the difference has measure below tol."""
        return self.minus(other).measure < tol

    def equal_e(self, other, tol=1e-12):
        return self.contained_e(other, tol) and other.contained_e(self, tol)

    def __or__(self, other):
        return self.join(other)

    def __and__(self, other):
        return self.meet(other)

    def __invert__(self):
        return self.complement()

    def indicator(self, thetas):
        """0/1 samples of the characteristic function at the given angles."""
        thetas = np.asarray(thetas, dtype=float) % TAU
        out = np.zeros(thetas.shape, dtype=bool)
        for a, b in self.arcs:
            out |= (thetas >= a) & (thetas < b)
        return out
