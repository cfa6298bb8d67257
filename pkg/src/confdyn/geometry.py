"""Minkowski four-vector algebra and light-front coordinate maps.

Conventions used everywhere in this package:

* metric signature (+, -, -, -), natural units, default mass scale m0 = 1
  (lengths and times in units of 1/m0);
* positions and velocities carry upper indices, momenta and gradients carry
  lower indices, so spatial components obey p_j = -p^j and the gradient of a
  scalar is the plain tuple of coordinate partials;
* light-front coordinates x+ = t + z and x- = t - z with the transverse pair
  (x1, x2) untouched;
* light-front momentum components p+ = (p0 + p3)/2 and p- = (p0 - p3)/2, so
  the invariant pairing is p.x = p+ x+ + p- x- + p_perp . x_perp and the mass
  shell reads p.p = 4 p+ p- - p_perp . p_perp = m^2.

A particle whose squared mass m^2(x) varies over spacetime moves on geodesics
of the conformally flat metric (m^2/m0^2) eta; everything here stays on flat
spacetime and that equivalence is kept as a remark only.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

METRIC_DIAG = np.array([1.0, -1.0, -1.0, -1.0])
METRIC = np.diag(METRIC_DIAG)


@dataclass(frozen=True)
class FourVector:
    """Contravariant spacetime vector with components (t, x, y, z)."""

    t: float
    x: float
    y: float
    z: float

    @staticmethod
    def from_array(arr) -> "FourVector":
        a = np.asarray(arr, dtype=float)
        if a.shape != (4,):
            raise ValueError(f"expected 4 components, got shape {a.shape}")
        return FourVector(float(a[0]), float(a[1]), float(a[2]), float(a[3]))

    def as_array(self) -> np.ndarray:
        return np.array([self.t, self.x, self.y, self.z])

    def lowered(self) -> np.ndarray:
        """Covariant components eta_{mu nu} v^nu."""
        return np.array([self.t, -self.x, -self.y, -self.z])

    def dot(self, other: "FourVector") -> float:
        return minkowski_dot(self, other)

    def norm2(self) -> float:
        """Invariant square v.v."""
        return minkowski_dot(self, self)

    @property
    def xplus(self) -> float:
        return self.t + self.z

    @property
    def xminus(self) -> float:
        return self.t - self.z

    @property
    def perp(self) -> np.ndarray:
        return np.array([self.x, self.y])

    def shifted(self, mu: int, delta: float) -> "FourVector":
        """Return a copy displaced by delta along coordinate axis mu."""
        comps = [self.t, self.x, self.y, self.z]
        comps[mu] += delta
        return FourVector(*comps)

    def __add__(self, other: "FourVector") -> "FourVector":
        return FourVector(self.t + other.t, self.x + other.x,
                          self.y + other.y, self.z + other.z)

    def __sub__(self, other: "FourVector") -> "FourVector":
        return FourVector(self.t - other.t, self.x - other.x,
                          self.y - other.y, self.z - other.z)

    def __mul__(self, s: float) -> "FourVector":
        return FourVector(s * self.t, s * self.x, s * self.y, s * self.z)

    __rmul__ = __mul__


@dataclass(frozen=True)
class LightFrontCoords:
    """Coordinates (x+, x-, x1, x2) of a spacetime point."""

    xplus: float
    xminus: float
    x1: float
    x2: float

    def as_array(self) -> np.ndarray:
        return np.array([self.xplus, self.xminus, self.x1, self.x2])


def minkowski_dot(a: FourVector, b: FourVector) -> float:
    """Invariant product a.b = a^0 b^0 - a^1 b^1 - a^2 b^2 - a^3 b^3.

    The same value written in light-front variables is
    (a+ b- + a- b+)/2 - a_perp . b_perp, so a.a = a+ a- - a_perp . a_perp.
    """
    return a.t * b.t - a.x * b.x - a.y * b.y - a.z * b.z


def lower_index(v_upper: np.ndarray) -> np.ndarray:
    """eta_{mu nu} v^nu for a 4-array of upper components."""
    return METRIC_DIAG * np.asarray(v_upper, dtype=float)


def raise_index(v_lower: np.ndarray) -> np.ndarray:
    """eta^{mu nu} v_nu; identical arithmetic to lower_index for diag eta."""
    return METRIC_DIAG * np.asarray(v_lower, dtype=float)


def contract(v_upper: np.ndarray, w_lower: np.ndarray) -> float:
    """Natural pairing v^mu w_mu of an upper vector with a covector.

    No metric factor enters: both arguments must already carry the stated
    index positions.
    """
    return float(np.dot(np.asarray(v_upper, dtype=float),
                        np.asarray(w_lower, dtype=float)))


def to_lightfront(x: FourVector) -> LightFrontCoords:
    return LightFrontCoords(x.t + x.z, x.t - x.z, x.x, x.y)


def from_lightfront(lf: LightFrontCoords) -> FourVector:
    return FourVector(0.5 * (lf.xplus + lf.xminus), lf.x1, lf.x2,
                      0.5 * (lf.xplus - lf.xminus))


def lf_momenta(p_lower: np.ndarray) -> np.ndarray:
    """Map lower-index Cartesian momenta (p0, p1, p2, p3) to
    (p+, p-, p1, p2) with p+- = (p0 +- p3)/2."""
    p = np.asarray(p_lower, dtype=float)
    return np.array([0.5 * (p[0] + p[3]), 0.5 * (p[0] - p[3]), p[1], p[2]])


def momenta_from_lf(pplus: float, pminus: float, p1: float, p2: float) -> np.ndarray:
    """Inverse of lf_momenta: (p0, p1, p2, p3) = (p+ + p-, p1, p2, p+ - p-)."""
    return np.array([pplus + pminus, p1, p2, pplus - pminus])


def lf_gradient(grad_lower: np.ndarray) -> np.ndarray:
    """Partials of a scalar with respect to (x+, x-, x1, x2) from its
    Cartesian lower-index gradient (g0, g1, g2, g3).

    d/dx+ = (g0 + g3)/2 and d/dx- = (g0 - g3)/2 at fixed other coordinates.
    """
    g = np.asarray(grad_lower, dtype=float)
    return np.array([0.5 * (g[0] + g[3]), 0.5 * (g[0] - g[3]), g[1], g[2]])


def mass_shell_gap(p_lower: np.ndarray, m2: float) -> float:
    """p.p - m^2 for a lower-index momentum; zero on shell."""
    p = np.asarray(p_lower, dtype=float)
    return float(p[0] ** 2 - p[1] ** 2 - p[2] ** 2 - p[3] ** 2 - m2)
