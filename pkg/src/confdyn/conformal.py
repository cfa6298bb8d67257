"""Conformal transformation generators and the conserved quantities they induce.

A generator is the parameter set (a, omega, lam, c) of the vector field

    xi^mu(x) = a^mu + omega^mu_nu x^nu + lam x^mu + c^mu (x.x) - 2 (c.x) x^mu

which is the general solution of the flat-space conformal Killing equation
d_mu xi_nu + d_nu xi_mu = (1/2) eta_{mu nu} (d.xi), with divergence

    d.xi = 4 lam - 8 (c.x).

Index conventions: the translation a is stored with an upper index, the
rotation/boost matrix omega_{mu nu} (antisymmetric) and the acceleration
parameter c_mu with lower indices.

A generator is a symmetry of the background m^2(x) when the defect

    xi.grad(m^2) + (1/2) m^2 (d.xi)

vanishes; along any orbit of the matching dynamics the charge Q = xi.p is
then conserved, and L = xi.grad + (1/4)(d.xi) maps Klein-Gordon solutions to
solutions.

Charges of the light-front generator family, written in the momentum
conventions of :mod:`confdyn.geometry` (p+- = (p0 +- p3)/2, all momentum
indices lower):

    translations            p0, p1, p2, p3 (equivalently p+, p-, p_perp)
    rotation about z        Lz = x p2 - y p1
    boost along z           x+ p+ - x- p-
    null rotations T_perp   2 x_perp p- + x+ p_perp
    null rotations U_perp   2 x_perp p+ + x- p_perp
    dilation                x.p
    special conformal       (c x.x - 2 (c.x) x).p
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .geometry import (METRIC, METRIC_DIAG, FourVector, contract, lf_gradient,
                       lower_index, minkowski_dot, raise_index)

_ANTISYM_TOL = 1e-12


@dataclass(frozen=True)
class ConformalGenerator:
    """Parameter set of a conformal Killing vector field.

    Fields
    ------
    a : upper-index translation four-vector (4,)
    omega : lower-index antisymmetric matrix omega_{mu nu} (4, 4)
    lam : dilation weight
    c : lower-index special conformal parameter c_mu (4,)
    label : optional human-readable name
    """

    a: np.ndarray
    omega: np.ndarray
    lam: float
    c: np.ndarray
    label: str = ""

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float).reshape(4)
        om = np.asarray(self.omega, dtype=float).reshape(4, 4)
        c = np.asarray(self.c, dtype=float).reshape(4)
        asym = np.max(np.abs(om + om.T))
        if asym > _ANTISYM_TOL * max(1.0, np.max(np.abs(om))):
            raise ValueError(f"omega is not antisymmetric (defect {asym:g})")
        # exact antisymmetrisation; a no-op for already antisymmetric input
        om = 0.5 * (om - om.T)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "omega", om)
        object.__setattr__(self, "lam", float(self.lam))
        object.__setattr__(self, "c", c)

    # -- cached raised-index views -------------------------------------
    @property
    def omega_mixed(self) -> np.ndarray:
        """omega^mu_nu = eta^{mu alpha} omega_{alpha nu}."""
        return METRIC_DIAG[:, None] * self.omega

    @property
    def c_upper(self) -> np.ndarray:
        return raise_index(self.c)

    # -- field evaluation ----------------------------------------------
    def killing(self, x: FourVector) -> np.ndarray:
        """Upper-index components xi^mu(x)."""
        xu = x.as_array()
        cx = contract(xu, self.c)
        xx = minkowski_dot(x, x)
        return (self.a + self.omega_mixed @ xu + self.lam * xu
                + self.c_upper * xx - 2.0 * cx * xu)

    def jacobian(self, x: FourVector) -> np.ndarray:
        """Mixed Jacobian J[mu, nu] = d_nu xi^mu(x), closed form."""
        xu = x.as_array()
        xl = x.lowered()
        cx = contract(xu, self.c)
        return (self.omega_mixed + self.lam * np.eye(4)
                + 2.0 * np.outer(self.c_upper, xl)
                - 2.0 * np.outer(xu, self.c)
                - 2.0 * cx * np.eye(4))

    def divergence(self, x: FourVector) -> float:
        """d.xi = 4 lam - 8 c.x, exact."""
        return 4.0 * self.lam - 8.0 * contract(x.as_array(), self.c)

    def is_zero(self, tol: float = 0.0) -> bool:
        return (np.all(np.abs(self.a) <= tol) and np.all(np.abs(self.omega) <= tol)
                and abs(self.lam) <= tol and np.all(np.abs(self.c) <= tol))

    # -- linear structure ------------------------------------------------
    def __add__(self, other: "ConformalGenerator") -> "ConformalGenerator":
        return ConformalGenerator(self.a + other.a, self.omega + other.omega,
                                  self.lam + other.lam, self.c + other.c)

    def __mul__(self, s: float) -> "ConformalGenerator":
        return ConformalGenerator(s * self.a, s * self.omega, s * self.lam,
                                  s * self.c, label=self.label)

    __rmul__ = __mul__

    def __sub__(self, other: "ConformalGenerator") -> "ConformalGenerator":
        return self + (-1.0) * other

    # -- serialization ---------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "a": self.a.tolist(),
            "omega": self.omega.tolist(),
            "lambda": self.lam,
            "c": self.c.tolist(),
            "label": self.label,
        }

    @staticmethod
    def from_dict(d: dict) -> "ConformalGenerator":
        om = np.asarray(d["omega"], dtype=float)
        if om.shape != (4, 4):
            raise ValueError(f"omega must be 4x4, got {om.shape}")
        if np.max(np.abs(om + om.T)) > _ANTISYM_TOL * max(1.0, np.max(np.abs(om))):
            raise ValueError("omega in serialized generator is not antisymmetric")
        return ConformalGenerator(np.asarray(d["a"], dtype=float), om,
                                  float(d["lambda"]),
                                  np.asarray(d["c"], dtype=float),
                                  label=d.get("label", ""))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @staticmethod
    def from_json(s: str) -> "ConformalGenerator":
        return ConformalGenerator.from_dict(json.loads(s))


# ---------------------------------------------------------------------------
# named constructors
# ---------------------------------------------------------------------------

def _zeros_gen(**kw):
    return dict(a=np.zeros(4), omega=np.zeros((4, 4)), lam=0.0, c=np.zeros(4)) | kw


def zero_generator() -> ConformalGenerator:
    return ConformalGenerator(**_zeros_gen(label="zero"))


def translation(a, label: str = "translation") -> ConformalGenerator:
    """Translation along the upper-index four-vector a; charge Q = a^mu p_mu."""
    if isinstance(a, FourVector):
        a = a.as_array()
    return ConformalGenerator(**_zeros_gen() | {"a": np.asarray(a, dtype=float)},
                              label=label)


def time_translation() -> ConformalGenerator:
    """Charge p0 (the instant-form Hamiltonian on shell)."""
    return translation([1.0, 0.0, 0.0, 0.0], label="P0")


def translation_axis(j: int) -> ConformalGenerator:
    """Spatial translation along axis j in {1,2,3}; charge p_j."""
    a = np.zeros(4)
    a[j] = 1.0
    return translation(a, label=f"P{j}")


def translation_xplus() -> ConformalGenerator:
    """Translation in x+ (a^+ = 1); charge p+ = (p0 + p3)/2, the front-form
    Hamiltonian on shell."""
    return translation([0.5, 0.0, 0.0, 0.5], label="P+")


def translation_xminus() -> ConformalGenerator:
    """Translation in x- (a^- = 1); charge p- = (p0 - p3)/2."""
    return translation([0.5, 0.0, 0.0, -0.5], label="P-")


def _lorentz(omega_lower: np.ndarray, label: str) -> ConformalGenerator:
    return ConformalGenerator(**_zeros_gen() | {"omega": omega_lower}, label=label)


def rotation_x() -> ConformalGenerator:
    """Charge Lx = y p3 - z p2."""
    om = np.zeros((4, 4))
    om[2, 3], om[3, 2] = 1.0, -1.0
    return _lorentz(om, "Lx")


def rotation_y() -> ConformalGenerator:
    """Charge Ly = z p1 - x p3."""
    om = np.zeros((4, 4))
    om[3, 1], om[1, 3] = 1.0, -1.0
    return _lorentz(om, "Ly")


def rotation_z() -> ConformalGenerator:
    """Charge Lz = x p2 - y p1."""
    om = np.zeros((4, 4))
    om[1, 2], om[2, 1] = 1.0, -1.0
    return _lorentz(om, "Lz")


def boost_axis(j: int) -> ConformalGenerator:
    """Boost along spatial axis j; charge x^j p0 + t p_j.

    Along z the charge in light-front variables is x+ p+ - x- p-.
    """
    om = np.zeros((4, 4))
    om[0, j], om[j, 0] = 1.0, -1.0
    return _lorentz(om, f"K{j}")


def boost_z() -> ConformalGenerator:
    return boost_axis(3)


def null_rotation_t(j: int) -> ConformalGenerator:
    """Null rotation fixing the x+ direction, transverse axis j in {1,2};
    charge T_j = 2 x^j p- + x+ p_j."""
    if j not in (1, 2):
        raise ValueError("transverse axis must be 1 or 2")
    om = np.zeros((4, 4))
    om[0, j], om[j, 0] = 1.0, -1.0
    om[j, 3], om[3, j] = -1.0, 1.0
    return _lorentz(om, f"T{j}")


def null_rotation_u(j: int) -> ConformalGenerator:
    """Null rotation fixing the x- direction, transverse axis j in {1,2};
    charge U_j = 2 x^j p+ + x- p_j."""
    if j not in (1, 2):
        raise ValueError("transverse axis must be 1 or 2")
    om = np.zeros((4, 4))
    om[0, j], om[j, 0] = 1.0, -1.0
    om[j, 3], om[3, j] = 1.0, -1.0
    return _lorentz(om, f"U{j}")


def dilation(lam: float = 1.0) -> ConformalGenerator:
    """Dilation xi = lam x; charge lam (x.p)."""
    return ConformalGenerator(**_zeros_gen() | {"lam": float(lam)}, label="D")


def special_conformal(c_lower, label: str = "C") -> ConformalGenerator:
    """Special conformal generator with lower-index parameter c_mu."""
    return ConformalGenerator(**_zeros_gen() | {"c": np.asarray(c_lower, dtype=float)},
                              label=label)


def special_conformal_lf() -> ConformalGenerator:
    """The special conformal generator with unit upper light-front minus
    component, c^- = 1 and c^+ = c_perp = 0, i.e. c_mu = (1/2, 0, 0, 1/2).

    Its light-front field components are
    xi^+ = -(x+)^2, xi^- = -x_perp.x_perp, xi^perp = -x+ x^perp, and
    c.x = x+/2, so d.xi = -4 x+.  It generates the symmetry of squared
    masses of the form f(u)/(x+)^2 with u = x- - x_perp.x_perp/x+.
    """
    return special_conformal([0.5, 0.0, 0.0, 0.5], label="C-")


# ---------------------------------------------------------------------------
# field-level operations
# ---------------------------------------------------------------------------

def killing_vector(g: ConformalGenerator, x: FourVector) -> np.ndarray:
    return g.killing(x)


def killing_jacobian(g: ConformalGenerator, x: FourVector) -> np.ndarray:
    return g.jacobian(x)


def divergence(g: ConformalGenerator, x: FourVector) -> float:
    return g.divergence(x)


def conformal_killing_residual(g: ConformalGenerator, x: FourVector) -> np.ndarray:
    """S_{mu nu} = d_mu xi_nu + d_nu xi_mu - (1/2) eta_{mu nu} d.xi
    from closed-form derivatives; identically zero for every generator."""
    jl = METRIC @ g.jacobian(x)       # jl[mu, nu] = d_nu xi_mu
    sym = jl.T + jl
    return sym - 0.5 * METRIC * g.divergence(x)


def killing_residual_fd(field: Callable[[FourVector], np.ndarray], x: FourVector,
                        h: float = 1e-5) -> np.ndarray:
    """Finite-difference conformal Killing residual of an arbitrary vector
    field (upper-index components).  Exists for negative tests: fields outside
    the conformal family produce a nonzero residual."""
    jl = np.zeros((4, 4))                # jl[mu, nu] = d_nu xi_mu
    for nu in range(4):
        fp = lower_index(field(x.shifted(nu, +h)))
        fm = lower_index(field(x.shifted(nu, -h)))
        jl[:, nu] = (fp - fm) / (2.0 * h)
    # d_mu xi^mu = eta^{mu mu} d_mu xi_mu for the diagonal metric
    div = float(np.sum(METRIC_DIAG * np.diag(jl)))
    return jl + jl.T - 0.5 * METRIC * div


def lie_bracket(g1: ConformalGenerator, g2: ConformalGenerator) -> ConformalGenerator:
    """Vector-field commutator [xi1, xi2] = xi1.grad xi2 - xi2.grad xi1,
    returned as a generator (the conformal family closes under it).

    Orientation check: lie_bracket(dilation(), translation(a)) is the
    translation by -a.  For the induced charges the matching identity is
    {xi1.p, xi2.p} = -[xi1, xi2].p in every canonical form.
    """
    j1 = g1.omega_mixed + g1.lam * np.eye(4)     # d_nu xi1^mu at the origin
    j2 = g2.omega_mixed + g2.lam * np.eye(4)

    def hess_contract(g: ConformalGenerator, avec: np.ndarray) -> np.ndarray:
        # a^alpha d_nu d_alpha xi^mu, constant in x for quadratic fields
        al = lower_index(avec)
        ca = contract(avec, g.c)
        return (2.0 * np.outer(g.c_upper, al) - 2.0 * ca * np.eye(4)
                - 2.0 * np.outer(avec, g.c))

    a_new = j2 @ g1.a - j1 @ g2.a
    j_new = (j2 @ j1 - j1 @ j2) + hess_contract(g2, g1.a) - hess_contract(g1, g2.a)
    lam_new = 0.25 * float(np.trace(j_new))
    omega_new = METRIC @ j_new - lam_new * METRIC
    c_new = g2.c @ j1 - g1.c @ j2
    lbl = f"[{g1.label},{g2.label}]" if (g1.label and g2.label) else ""
    return ConformalGenerator(a_new, omega_new, lam_new, c_new, label=lbl)


def symmetry_defect(g: ConformalGenerator, bg, x: FourVector) -> float:
    """xi.grad(m^2) + (1/2) m^2 (d.xi); zero iff xi.p is conserved along the
    background's orbits and L = xi.grad + (1/4) d.xi is a wave-operator
    symmetry.  Raises the background's own errors on singular surfaces."""
    xi = g.killing(x)
    grad = bg.grad_m2(x)
    return contract(xi, grad) + 0.5 * bg.m2(x) * g.divergence(x)


# ---------------------------------------------------------------------------
# conserved quantities
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConservedQuantity:
    """A scalar phase-space function Q(state; background) with provenance.

    func(state, bg) evaluates the quantity; partials(state, bg), when
    provided, returns closed-form gradients (dQ/dq, dQ/dp) with respect to
    the canonical variables of the state's form, used by Poisson brackets
    and independence ranks.  generator records the conformal origin when the
    quantity is a charge xi.p; hidden (polynomial-in-momenta) quantities set
    it to None.
    """

    label: str
    func: Callable
    partials: Optional[Callable] = None
    generator: Optional[ConformalGenerator] = None
    provenance: str = "phase-space"

    def __call__(self, state, bg=None) -> float:
        return self.func(state, bg)


def conserved_from_generator(g: ConformalGenerator, state, bg) -> float:
    """Charge Q = xi^mu(x) p_mu evaluated on a phase-space state, with the
    momentum reconstructed on shell where the form requires it."""
    x = state.position()
    p = state.four_momentum(bg)
    return contract(g.killing(x), p)


def _lf_components(v_upper: np.ndarray):
    """(v^+, v^-, v^1, v^2) of an upper-index vector."""
    return (v_upper[0] + v_upper[3], v_upper[0] - v_upper[3],
            v_upper[1], v_upper[2])


def _generator_partials(g: ConformalGenerator, state, bg):
    """Closed-form (dQ/dq, dQ/dp) of Q = xi.p in the state's canonical
    variables; uses the chain rule through the on-shell Hamiltonian where
    the form eliminates a momentum component."""
    x = state.position()
    p = state.four_momentum(bg)
    xi = g.killing(x)
    jac = g.jacobian(x)                        # jac[mu, nu] = d_nu xi^mu

    if state.form == "instant":
        from .dynamics import hamiltonian_instant
        H = hamiltonian_instant(state, bg)
        grad = bg.grad_m2(x)
        dq = np.empty(3)
        for k in range(3):
            dHdx = grad[k + 1] / (2.0 * H)
            dq[k] = contract(jac[:, k + 1], p) + xi[0] * dHdx
        dp = xi[1:4] + xi[0] * state.p / H
        return dq, dp

    if state.form == "front":
        pminus = state.p[0]
        pperp = state.p[1:3]
        Hval = p[0] - pminus                       # p+ on shell
        lfg = lf_gradient(bg.grad_m2(x))           # (d+, d-, d1, d2) of m^2
        xip, xim, xi1, xi2 = _lf_components(xi)
        # coordinate derivatives of xi^mu along (x-, x1, x2)
        dm = 0.5 * (jac[:, 0] - jac[:, 3])
        d1 = jac[:, 1]
        d2 = jac[:, 2]
        dH_dxm = lfg[1] / (4.0 * pminus)
        dH_d1 = lfg[2] / (4.0 * pminus)
        dH_d2 = lfg[3] / (4.0 * pminus)
        dq = np.array([contract(dm, p) + xip * dH_dxm,
                       contract(d1, p) + xip * dH_d1,
                       contract(d2, p) + xip * dH_d2])
        dH_dpm = -Hval / pminus
        dp = np.array([xip * dH_dpm + xim,
                       xip * pperp[0] / (2.0 * pminus) + xi1,
                       xip * pperp[1] / (2.0 * pminus) + xi2])
        return dq, dp

    if state.form == "extended":
        xip, xim, xi1, xi2 = _lf_components(xi)
        dpl = 0.5 * (jac[:, 0] + jac[:, 3])
        dm = 0.5 * (jac[:, 0] - jac[:, 3])
        dq = np.array([contract(dpl, p), contract(dm, p),
                       contract(jac[:, 1], p), contract(jac[:, 2], p)])
        dp = np.array([xip, xim, xi1, xi2])
        return dq, dp

    raise ValueError(f"no canonical partials for form {state.form!r}")


def generator_quantity(g: ConformalGenerator, label: str = "") -> ConservedQuantity:
    """Wrap a generator's charge xi.p as a ConservedQuantity with closed-form
    partials in the instant, front and extended forms."""
    return ConservedQuantity(
        label=label or (g.label or "xi.p"),
        func=lambda state, bg, _g=g: conserved_from_generator(_g, state, bg),
        partials=lambda state, bg, _g=g: _generator_partials(_g, state, bg),
        generator=g,
        provenance="generator",
    )


# -- hidden (non-geometric) quantities --------------------------------------

def spacelike_hidden_quantity(which: int, B: float) -> ConservedQuantity:
    """The quadratic-in-momentum constants of m^2 = m0^2 + B z in the instant
    form: which=3 gives 2 p1 p3 + B x, which=4 gives 2 p2 p3 + B y."""
    if which not in (3, 4):
        raise ValueError("which must be 3 or 4")
    i = which - 3   # transverse index 0 or 1

    def val(state, bg=None):
        if state.form != "instant":
            raise ValueError("spacelike hidden quantities live in the instant form")
        return 2.0 * state.p[i] * state.p[2] + B * state.q[i]

    def parts(state, bg=None):
        dq = np.zeros(3)
        dq[i] = B
        dp = np.zeros(3)
        dp[i] = 2.0 * state.p[2]
        dp[2] = 2.0 * state.p[i]
        return dq, dp

    return ConservedQuantity(label=f"Q{which}", func=val, partials=parts,
                             provenance="hidden")


def spacelike_set(B: float) -> list[ConservedQuantity]:
    """The five constants of motion of m^2 = m0^2 + B z (instant form):
    p1, p2, the two hidden quadratics, and the Hamiltonian p0."""
    q1 = generator_quantity(translation_axis(1), "Q1")
    q2 = generator_quantity(translation_axis(2), "Q2")
    q3 = spacelike_hidden_quantity(3, B)
    q4 = spacelike_hidden_quantity(4, B)
    q5 = generator_quantity(time_translation(), "Q5")
    return [q1, q2, q3, q4, q5]


def momentum_p3_quantity() -> ConservedQuantity:
    """z-momentum p3 as an instant-form quantity (generically not conserved
    on z-dependent backgrounds; monitored for its predicted drift)."""
    return generator_quantity(translation_axis(3), "p3")


def angular_momentum_z_quantity(scale: float = 1.0) -> ConservedQuantity:
    """scale * (x p2 - y p1) in the instant form.  With scale = B this equals
    the combination Q3 Q2 - Q4 Q1 of the spacelike hidden quantities, and it
    is conserved by both the relativistic and the nonrelativistic flows."""

    def val(state, bg=None):
        return scale * (state.q[0] * state.p[1] - state.q[1] * state.p[0])

    def parts(state, bg=None):
        dq = scale * np.array([state.p[1], -state.p[0], 0.0])
        dp = scale * np.array([-state.q[1], state.q[0], 0.0])
        return dq, dp

    return ConservedQuantity(label="B.Lz" if scale != 1.0 else "Lz",
                             func=val, partials=parts, provenance="hidden")


def mass_shell_quantity(bg) -> ConservedQuantity:
    """Extended-form Q = 4 p+ p- - p_perp.p_perp - m^2(x); vanishes on shell
    and is conserved because the extended Hamiltonian is K = H - p+."""

    def val(state, _bg=None):
        b = _bg or bg
        pplus, pminus, p1, p2 = state.p
        return 4.0 * pplus * pminus - p1 * p1 - p2 * p2 - b.m2(state.position())

    def parts(state, _bg=None):
        b = _bg or bg
        lfg = lf_gradient(b.grad_m2(state.position()))
        dq = np.array([-lfg[0], -lfg[1], -lfg[2], -lfg[3]])
        pplus, pminus, p1, p2 = state.p
        dp = np.array([4.0 * pminus, 4.0 * pplus, -2.0 * p1, -2.0 * p2])
        return dq, dp

    return ConservedQuantity(label="Q6", func=val, partials=parts,
                             provenance="hidden")


def planewave_cubic_quantity(bg) -> ConservedQuantity:
    """Extended-form Q = 4 p-^2 x- - p_perp.p_perp x+ - int_0^{x+} m^2, the
    cubic constant of plane-wave backgrounds m^2(x+)."""
    if bg.m2_antiderivative is None:
        raise ValueError("background must provide an antiderivative of m^2 along x+")

    def val(state, _bg=None):
        b = _bg or bg
        xplus, xminus = state.q[0], state.q[1]
        pplus, pminus, p1, p2 = state.p
        return (4.0 * pminus ** 2 * xminus - (p1 * p1 + p2 * p2) * xplus
                - b.m2_antiderivative(xplus))

    def parts(state, _bg=None):
        b = _bg or bg
        xplus, xminus = state.q[0], state.q[1]
        pplus, pminus, p1, p2 = state.p
        m2 = b.m2(state.position())
        dq = np.array([-(p1 * p1 + p2 * p2) - m2, 4.0 * pminus ** 2, 0.0, 0.0])
        dp = np.array([0.0, 8.0 * pminus * xminus, -2.0 * p1 * xplus,
                       -2.0 * p2 * xplus])
        return dq, dp

    return ConservedQuantity(label="Q7", func=val, partials=parts,
                             provenance="hidden")


def extended_hamiltonian_quantity(bg) -> ConservedQuantity:
    """K = (p_perp.p_perp + m^2(x))/(4 p-) - p+ on the extended phase space."""

    def val(state, _bg=None):
        from .dynamics import hamiltonian_extended
        return hamiltonian_extended(state, _bg or bg)

    def parts(state, _bg=None):
        b = _bg or bg
        pplus, pminus, p1, p2 = state.p
        m2 = b.m2(state.position())
        lfg = lf_gradient(b.grad_m2(state.position()))
        dq = lfg / (4.0 * pminus)
        pp = p1 * p1 + p2 * p2
        dp = np.array([-1.0, -(pp + m2) / (4.0 * pminus ** 2),
                       p1 / (2.0 * pminus), p2 / (2.0 * pminus)])
        return dq, dp

    return ConservedQuantity(label="K", func=val, partials=parts,
                             provenance="hidden")


def planewave_extended_set(bg) -> list[ConservedQuantity]:
    """The seven constants of plane-wave backgrounds m^2(x+) on the extended
    front-form phase space: p1, p2, p-, the two null-rotation charges
    2 x_perp p- + x+ p_perp, the mass-shell quantity and the cubic one."""
    return [
        generator_quantity(translation_axis(1), "Q1"),
        generator_quantity(translation_axis(2), "Q2"),
        generator_quantity(translation_xminus(), "Q3"),
        generator_quantity(null_rotation_t(1), "Q4"),
        generator_quantity(null_rotation_t(2), "Q5"),
        mass_shell_quantity(bg),
        planewave_cubic_quantity(bg),
    ]


def conformal_extended_set(bg) -> list[ConservedQuantity]:
    """The five constants of inverse-square light-front masses f(u)/(x+)^2 on
    the extended phase space: the two null-rotation charges, the special
    conformal charge, Lz, and the extended Hamiltonian K."""
    return [
        generator_quantity(null_rotation_t(1), "Q1"),
        generator_quantity(null_rotation_t(2), "Q2"),
        generator_quantity(special_conformal_lf(), "Q3"),
        generator_quantity(rotation_z(), "Q4"),
        extended_hamiltonian_quantity(bg),
    ]


def conformal_front_set() -> list[ConservedQuantity]:
    """The generator charges of f(u)/(x+)^2 masses evaluated on plain
    front-form states (p+ reconstructed on shell): the two null-rotation
    charges, the special conformal charge, and Lz.  The extended Hamiltonian
    is omitted since it vanishes identically on shell."""
    return [
        generator_quantity(null_rotation_t(1), "Q1"),
        generator_quantity(null_rotation_t(2), "Q2"),
        generator_quantity(special_conformal_lf(), "Q3"),
        generator_quantity(rotation_z(), "Q4"),
    ]


def planewave_front_set_xminus() -> list[ConservedQuantity]:
    """Five front-form constants of m^2(x-): p1, p2, the Hamiltonian p+, and
    the null-rotation charges 2 x_perp p+ + x- p_perp."""
    return [
        generator_quantity(translation_axis(1), "Q1"),
        generator_quantity(translation_axis(2), "Q2"),
        generator_quantity(translation_xplus(), "H"),
        generator_quantity(null_rotation_u(1), "Q4"),
        generator_quantity(null_rotation_u(2), "Q5"),
    ]


def poincare_set() -> list[ConservedQuantity]:
    """The ten free-particle charges: four translations, three rotations,
    three boosts."""
    gens = [time_translation(), translation_axis(1), translation_axis(2),
            translation_axis(3), rotation_x(), rotation_y(), rotation_z(),
            boost_axis(1), boost_axis(2), boost_axis(3)]
    return [generator_quantity(g) for g in gens]


def dilation_mass_set() -> list[ConservedQuantity]:
    """Charges conserved on m^2 = const/(x.x): the two null rotations fixing
    x+ and the dilation charge."""
    return [
        generator_quantity(null_rotation_t(1), "T1.p"),
        generator_quantity(null_rotation_t(2), "T2.p"),
        generator_quantity(dilation(), "D.p"),
    ]


def quantity_product(qa: ConservedQuantity, qb: ConservedQuantity,
                     label: str) -> ConservedQuantity:
    """Pointwise product of two quantities, with product-rule partials when
    both factors provide them."""

    def val(state, bg=None):
        return qa.func(state, bg) * qb.func(state, bg)

    parts = None
    if qa.partials is not None and qb.partials is not None:
        def parts(state, bg=None):
            va, vb = qa.func(state, bg), qb.func(state, bg)
            dqa, dpa = qa.partials(state, bg)
            dqb, dpb = qb.partials(state, bg)
            return va * dqb + vb * dqa, va * dpb + vb * dpa

    return ConservedQuantity(label=label, func=val, partials=parts,
                             provenance="composite")
