"""Scalar background fields m^2(x) with analytic lower-index gradients.

Each background packages the squared mass, its gradient d_mu m^2 (the plain
tuple of coordinate partials, which carries a lower index), a smoothness
predicate, and the switch surfaces where the field turns on.  Sampling a
negative squared mass raises RealityError; sampling on a singular surface
(x+ = 0 for the inverse-square light-front families, the light cone for the
dilation family) raises SingularityError.

Families
--------
constant            m^2 = m0^2
linear_z            m^2 = m0^2 + B z   (optionally only for z > 0)
timelike            m^2 = m0^2 + E(t)  (optionally only for t > 0)
plane_wave          m^2 = g(x+) or g(x-)
special_conformal   m^2 = f(u)/(x+)^2,  u = x- - x_perp.x_perp/x+
special_conformal_switched
                    m0^2 for x+ < L, then (m0^2 L^2/(x+)^2) exp(-k^2 u^2)
dilation            m^2 = csq/(x.x)
"""

from __future__ import annotations

from typing import Callable, Optional

import numpy as np

from .errors import RealityError, SingularityError
from .geometry import FourVector

_SING_EPS = 1e-12


class ScalarBackground:
    """A squared-mass field with gradient, domain data and switch surfaces.

    Parameters
    ----------
    label : family name
    m2_fn, grad_fn : callables on FourVector; grad_fn returns the four
        coordinate partials (lower index)
    smooth_fn : True away from kinks/singular surfaces (default: everywhere)
    events : list of (name, fn) switch surfaces, fn(FourVector) -> signed value
    m2_antiderivative : for plane-wave x+ profiles, x+ -> int_0^{x+} m^2
    params : family parameters, kept for serialization and dispatch
    """

    def __init__(self, label: str, m2_fn: Callable, grad_fn: Callable,
                 smooth_fn: Optional[Callable] = None, events=(),
                 m2_antiderivative: Optional[Callable] = None,
                 params: Optional[dict] = None):
        self.label = label
        self._m2 = m2_fn
        self._grad = grad_fn
        self._smooth = smooth_fn or (lambda x: True)
        self.events = list(events)
        self.m2_antiderivative = m2_antiderivative
        self.params = dict(params or {})

    def m2(self, x: FourVector) -> float:
        v = float(self._m2(x))
        if v < 0.0:
            raise RealityError(
                f"m^2 = {v:g} < 0 sampled at (t,x,y,z) = "
                f"({x.t:g}, {x.x:g}, {x.y:g}, {x.z:g}) on background {self.label!r}")
        return v

    def grad_m2(self, x: FourVector) -> np.ndarray:
        return np.asarray(self._grad(x), dtype=float)

    def mass(self, x: FourVector) -> float:
        return float(np.sqrt(self.m2(x)))

    def smooth_at(self, x: FourVector) -> bool:
        return bool(self._smooth(x))

    def m2_integral(self, w: float) -> float:
        """int_0^w m^2 along the x+ axis: the stored antiderivative when the
        family provides one, otherwise adaptive quadrature of the profile.
        Meaningful for fields depending on x+ only."""
        if self.m2_antiderivative is not None:
            return float(self.m2_antiderivative(w))
        from scipy.integrate import quad
        val, _ = quad(lambda s: self.m2(FourVector(0.5 * s, 0.0, 0.0, 0.5 * s)),
                      0.0, w, epsabs=1e-12, epsrel=1e-12, limit=200)
        return float(val)

    def __repr__(self):
        return f"ScalarBackground({self.label!r}, params={self.params})"


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------

def constant(m0sq: float = 1.0) -> ScalarBackground:
    if m0sq < 0:
        raise ValueError("m0sq must be nonnegative")
    return ScalarBackground(
        "constant",
        lambda x: m0sq,
        lambda x: np.zeros(4),
        params={"family": "constant", "m0sq": m0sq},
    )


def linear_z(B: float, m0sq: float = 1.0, switched: bool = True) -> ScalarBackground:
    """m^2 = m0^2 + B z; with switched=True the field occupies z > 0 only and
    matches the constant vacuum value continuously across z = 0 (C0 kink)."""

    def m2(x):
        if switched and x.z <= 0.0:
            return m0sq
        return m0sq + B * x.z

    def grad(x):
        if switched and x.z < 0.0:
            return np.zeros(4)
        # on the kink itself, report the field-side slope
        return np.array([0.0, 0.0, 0.0, B])

    return ScalarBackground(
        "linear_z", m2, grad,
        smooth_fn=(lambda x: abs(x.z) > _SING_EPS) if switched else None,
        events=[("z=0", lambda x: x.z)] if switched else (),
        params={"family": "linear_z", "B": B, "m0sq": m0sq, "switched": switched},
    )


def timelike(E: Callable[[float], float], dE: Callable[[float], float],
             m0sq: float = 1.0, switched: bool = True) -> ScalarBackground:
    """m^2 = m0^2 + E(t), turned on at t = 0 when switched."""

    def m2(x):
        if switched and x.t <= 0.0:
            return m0sq
        return m0sq + E(x.t)

    def grad(x):
        if switched and x.t < 0.0:
            return np.zeros(4)
        return np.array([dE(x.t), 0.0, 0.0, 0.0])

    return ScalarBackground(
        "timelike", m2, grad,
        smooth_fn=(lambda x: abs(x.t) > _SING_EPS) if switched else None,
        events=[("t=0", lambda x: x.t)] if switched else (),
        params={"family": "timelike", "m0sq": m0sq, "switched": switched},
    )


def plane_wave(profile: Callable[[float], float], dprofile: Callable[[float], float],
               antiderivative: Optional[Callable[[float], float]] = None,
               argument: str = "xplus", label: str = "plane_wave",
               params: Optional[dict] = None) -> ScalarBackground:
    """m^2 = profile(x+) (argument="xplus") or profile(x-) (argument="xminus").

    The gradient follows from the chain rule: d_mu x+ = (1, 0, 0, 1) and
    d_mu x- = (1, 0, 0, -1)."""
    if argument not in ("xplus", "xminus"):
        raise ValueError("argument must be 'xplus' or 'xminus'")
    direction = (np.array([1.0, 0.0, 0.0, 1.0]) if argument == "xplus"
                 else np.array([1.0, 0.0, 0.0, -1.0]))

    def w(x: FourVector) -> float:
        return x.xplus if argument == "xplus" else x.xminus

    base = {"family": "plane_wave", "argument": argument}
    return ScalarBackground(
        label,
        lambda x: profile(w(x)),
        lambda x: dprofile(w(x)) * direction,
        m2_antiderivative=antiderivative if argument == "xplus" else None,
        params=base | (params or {}),
    )


def plane_wave_sin2(m0sq: float = 1.0, amp: float = 0.5, k: float = 1.0,
                    argument: str = "xplus") -> ScalarBackground:
    """Smooth oscillating profile m^2 = m0^2 (1 + amp sin^2(k w)) with an
    exact antiderivative; amp > -1 keeps the field positive."""
    if amp <= -1.0:
        raise ValueError("amp must exceed -1 to keep m^2 positive")

    def prof(w):
        return m0sq * (1.0 + amp * np.sin(k * w) ** 2)

    def dprof(w):
        return m0sq * amp * k * np.sin(2.0 * k * w)

    def anti(w):
        # int_0^w m0^2 (1 + amp sin^2(k s)) ds
        return m0sq * (w + amp * (0.5 * w - np.sin(2.0 * k * w) / (4.0 * k)))

    return plane_wave(prof, dprof, anti, argument=argument, label="plane_wave_sin2",
                      params={"profile": "sin2", "m0sq": m0sq, "amp": amp, "k": k})


def plane_wave_tabulated(w_samples, m2_samples, argument: str = "xplus") -> ScalarBackground:
    """Plane-wave profile interpolated from samples with a cubic spline; the
    derivative and antiderivative come from the spline itself."""
    from scipy.interpolate import CubicSpline
    w = np.asarray(w_samples, dtype=float)
    v = np.asarray(m2_samples, dtype=float)
    if np.any(v < 0):
        raise ValueError("tabulated m^2 samples must be nonnegative")
    spl = CubicSpline(w, v)
    dspl = spl.derivative()
    ispl = spl.antiderivative()
    i0 = float(ispl(0.0)) if w[0] <= 0.0 <= w[-1] else float(ispl(w[0]))

    return plane_wave(lambda s: float(spl(s)), lambda s: float(dspl(s)),
                      lambda s: float(ispl(s)) - i0, argument=argument,
                      label="plane_wave_tabulated",
                      params={"profile": "tabulated", "n": len(w)})


def _uvar(x: FourVector) -> float:
    return x.xminus - float(x.perp @ x.perp) / x.xplus


def _grad_u(x: FourVector) -> np.ndarray:
    # u = x- - (x1^2 + x2^2)/x+ with d_mu x+- = (1, 0, 0, +-1)
    xp = x.xplus
    r2 = float(x.perp @ x.perp)
    return np.array([1.0 + r2 / xp ** 2, -2.0 * x.x / xp, -2.0 * x.y / xp,
                     -1.0 + r2 / xp ** 2])


def special_conformal_mass(f: Callable[[float], float], df: Callable[[float], float],
                           label: str = "special_conformal",
                           params: Optional[dict] = None) -> ScalarBackground:
    """m^2 = f(u)/(x+)^2 with u = x- - x_perp.x_perp/x+; singular at x+ = 0."""

    def check(x):
        if abs(x.xplus) < _SING_EPS:
            raise SingularityError(f"x+ = {x.xplus:g} on the singular surface of {label}")

    def m2(x):
        check(x)
        return f(_uvar(x)) / x.xplus ** 2

    def grad(x):
        check(x)
        xp = x.xplus
        u = _uvar(x)
        dxp = np.array([1.0, 0.0, 0.0, 1.0])
        return df(u) / xp ** 2 * _grad_u(x) - 2.0 * f(u) / xp ** 3 * dxp

    return ScalarBackground(
        label, m2, grad,
        params={"family": "special_conformal"} | (params or {}),
    )


def special_conformal_switched(m0sq: float = 1.0, L: float = 1.0,
                               k: float = 1.0) -> ScalarBackground:
    """Constant m0^2 before the light front x+ = L, then the inverse-square
    profile (m0^2 L^2/(x+)^2) exp(-k^2 u^2).

    The two pieces join continuously only on the u = 0 slice; orbits used for
    quantitative checks should cross x+ = L there (the x_perp = p_perp = 0
    branch entering at x- = 0 does)."""
    if L <= 0:
        raise ValueError("switch position L must be positive")
    A = m0sq * L * L

    def f(u):
        return A * np.exp(-(k * u) ** 2)

    def df(u):
        return -2.0 * k * k * u * f(u)

    pure = special_conformal_mass(f, df)

    def m2(x):
        if x.xplus <= L:
            return m0sq
        return pure._m2(x)

    def grad(x):
        if x.xplus < L:
            return np.zeros(4)
        return pure._grad(x)

    return ScalarBackground(
        "special_conformal_switched", m2, grad,
        smooth_fn=lambda x: abs(x.xplus - L) > _SING_EPS,
        events=[("xplus=L", lambda x: x.xplus - L)],
        m2_antiderivative=None,
        params={"family": "special_conformal_switched", "m0sq": m0sq,
                "L": L, "k": k},
    )


def special_conformal_gaussian(m0sq: float = 1.0, L: float = 1.0,
                               k: float = 1.0) -> ScalarBackground:
    """The unswitched inverse-square Gaussian profile f(u) = m0^2 L^2 e^{-k^2 u^2}."""
    A = m0sq * L * L

    def f(u):
        return A * np.exp(-(k * u) ** 2)

    def df(u):
        return -2.0 * k * k * u * f(u)

    return special_conformal_mass(
        f, df, label="special_conformal_gaussian",
        params={"profile": "gaussian", "m0sq": m0sq, "L": L, "k": k})


def dilation_mass(csq: float = 1.0) -> ScalarBackground:
    """m^2 = csq/(x.x); real only inside the light cone (x.x > 0 given csq > 0),
    singular on it."""
    if csq <= 0:
        raise ValueError("csq must be positive")

    def m2(x):
        xx = x.norm2()
        if abs(xx) < _SING_EPS:
            raise SingularityError(f"x.x = {xx:g} on the light cone")
        return csq / xx

    def grad(x):
        xx = x.norm2()
        if abs(xx) < _SING_EPS:
            raise SingularityError(f"x.x = {xx:g} on the light cone")
        return -2.0 * csq / xx ** 2 * x.lowered()

    return ScalarBackground("dilation", m2, grad,
                            params={"family": "dilation", "csq": csq})


def from_callable(m2_fn: Callable[[FourVector], float],
                  grad_fn: Optional[Callable] = None,
                  scale: float = 1.0, label: str = "user",
                  params: Optional[dict] = None) -> ScalarBackground:
    """Wrap a user-supplied squared mass.  Without grad_fn the gradient falls
    back to fourth-order central differences with step 1e-5 * scale."""
    h = 1e-5 * scale

    def fd_grad(x):
        g = np.zeros(4)
        for mu in range(4):
            f2p = m2_fn(x.shifted(mu, 2 * h))
            f1p = m2_fn(x.shifted(mu, h))
            f1m = m2_fn(x.shifted(mu, -h))
            f2m = m2_fn(x.shifted(mu, -2 * h))
            g[mu] = (-f2p + 8.0 * f1p - 8.0 * f1m + f2m) / (12.0 * h)
        return g

    return ScalarBackground(label, m2_fn, grad_fn or fd_grad,
                            params={"family": "user"} | (params or {}))


# ---------------------------------------------------------------------------
# config-driven construction (used by the command line layer)
# ---------------------------------------------------------------------------

def from_params(params: dict) -> ScalarBackground:
    """Build a background from a flat parameter dictionary with a 'family' key."""
    fam = params.get("family")
    if fam == "constant":
        return constant(float(params.get("m0sq", 1.0)))
    if fam == "linear_z":
        sw = params.get("switched", True)
        if isinstance(sw, str):
            sw = sw.strip().lower() in ("1", "true", "yes", "on")
        return linear_z(float(params["B"]), float(params.get("m0sq", 1.0)), sw)
    if fam == "plane_wave":
        prof = params.get("profile", "sin2")
        arg = params.get("argument", "xplus")
        if prof == "sin2":
            return plane_wave_sin2(float(params.get("m0sq", 1.0)),
                                   float(params.get("amp", 0.5)),
                                   float(params.get("k", 1.0)), argument=arg)
        if prof == "tabulated":
            table = np.loadtxt(params["path"], delimiter=",")
            return plane_wave_tabulated(table[:, 0], table[:, 1], argument=arg)
        raise ValueError(f"unknown plane-wave profile {prof!r}")
    if fam == "special_conformal_switched":
        return special_conformal_switched(float(params.get("m0sq", 1.0)),
                                          float(params.get("L", 1.0)),
                                          float(params.get("k", 1.0)))
    if fam == "special_conformal_gaussian":
        return special_conformal_gaussian(float(params.get("m0sq", 1.0)),
                                          float(params.get("L", 1.0)),
                                          float(params.get("k", 1.0)))
    if fam == "dilation":
        return dilation_mass(float(params.get("csq", 1.0)))
    raise ValueError(f"unknown background family {fam!r}")
