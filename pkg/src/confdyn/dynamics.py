"""Hamiltonian flows for a relativistic particle in a scalar background.

Forms of dynamics and their canonical variables:

instant    time t,  q = (x, y, z),          p = (p1, p2, p3),  H = sqrt(p.p + m^2)
front      time x+, q = (x-, x1, x2),       p = (p-, p1, p2),  H = (p_perp.p_perp + m^2)/(4 p-)
extended   time s,  q = (x+, x-, x1, x2),   p = (p+, p-, p1, p2), K = H - p+
covariant  time tau, q = x^mu,              p slot holds dx/dtau (upper index)

All momenta carry lower indices.  Evolution follows the convention

    dQ/dt = dQ/dt|_explicit - {Q, H},   {A, B} = dA/dq.dB/dp - dA/dp.dB/dq,

so coordinates obey dq/dt = -dH/dp and momenta dp/dt = +dH/dq; for the
instant form this is the familiar dx^j/dt = -p_j/H with lower-index p_j.
The extended form adds (x+, p+) as a canonical pair, evolves in an affine
parameter with dx+/ds = 1, and uses the same bracket over all four pairs.
The covariant form integrates m (d^2x_mu/dtau^2) = (eta_{mu nu} -
xdot_mu xdot_nu) d^nu m with xdot.xdot = 1.

The adaptive integrator is an embedded Runge-Kutta 5(4) pair with event
location for switch surfaces (the integration restarts cleanly on each C0
kink); a fixed-step classical Runge-Kutta scheme is available for
convergence studies.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .errors import ReconstructionError, SingularityError
from .geometry import FourVector, lf_gradient, lower_index, raise_index

_FORMS = ("instant", "front", "extended", "covariant")


@dataclass(frozen=True)
class PhaseSpaceState:
    """A point of one of the four phase spaces; see the module docstring for
    the layout of q and p per form."""

    form: str
    time: float
    q: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        if self.form not in _FORMS:
            raise ValueError(f"unknown form {self.form!r}")
        q = np.asarray(self.q, dtype=float)
        p = np.asarray(self.p, dtype=float)
        n = {"instant": 3, "front": 3, "extended": 4, "covariant": 4}[self.form]
        if q.shape != (n,) or p.shape != (n,):
            raise ValueError(f"form {self.form!r} needs q, p of shape ({n},)")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "time", float(self.time))

    def position(self) -> FourVector:
        """Spacetime point of the state (upper-index components)."""
        if self.form == "instant":
            return FourVector(self.time, self.q[0], self.q[1], self.q[2])
        if self.form == "front":
            xplus, xminus = self.time, self.q[0]
            return FourVector(0.5 * (xplus + xminus), self.q[1], self.q[2],
                              0.5 * (xplus - xminus))
        if self.form == "extended":
            xplus, xminus = self.q[0], self.q[1]
            return FourVector(0.5 * (xplus + xminus), self.q[2], self.q[3],
                              0.5 * (xplus - xminus))
        return FourVector(*self.q)

    def four_momentum(self, bg) -> np.ndarray:
        """Lower-index (p0, p1, p2, p3), reconstructed on shell where the
        form eliminates a component."""
        if self.form == "instant":
            H = hamiltonian_instant(self, bg)
            return np.array([H, self.p[0], self.p[1], self.p[2]])
        if self.form == "front":
            pplus = hamiltonian_front(self, bg)
            pminus = self.p[0]
            return np.array([pplus + pminus, self.p[1], self.p[2], pplus - pminus])
        if self.form == "extended":
            pplus, pminus = self.p[0], self.p[1]
            return np.array([pplus + pminus, self.p[2], self.p[3], pplus - pminus])
        m = bg.mass(self.position())
        if m <= 0.0:
            raise ReconstructionError("covariant momentum needs m > 0")
        return m * lower_index(self.p)

    def xdot(self) -> FourVector:
        if self.form != "covariant":
            raise ValueError("xdot is defined for the covariant form only")
        return FourVector(*self.p)

    def replace(self, **kw) -> "PhaseSpaceState":
        return dataclasses.replace(self, **kw)


def instant_state(t: float, xyz, p) -> PhaseSpaceState:
    return PhaseSpaceState("instant", t, np.asarray(xyz, float), np.asarray(p, float))


def front_state(xplus: float, xminus: float, xperp, pminus: float,
                pperp) -> PhaseSpaceState:
    if pminus == 0.0:
        raise SingularityError("front form requires p- != 0")
    xperp = np.asarray(xperp, float)
    pperp = np.asarray(pperp, float)
    return PhaseSpaceState("front", xplus, np.array([xminus, xperp[0], xperp[1]]),
                           np.array([pminus, pperp[0], pperp[1]]))


def extended_state(xplus: float, xminus: float, xperp, pplus: float,
                   pminus: float, pperp, s: float = 0.0) -> PhaseSpaceState:
    xperp = np.asarray(xperp, float)
    pperp = np.asarray(pperp, float)
    return PhaseSpaceState("extended", s,
                           np.array([xplus, xminus, xperp[0], xperp[1]]),
                           np.array([pplus, pminus, pperp[0], pperp[1]]))


def extended_state_on_shell(bg, xplus: float, xminus: float, xperp,
                            pminus: float, pperp, s: float = 0.0) -> PhaseSpaceState:
    """Extended state with p+ fixed by the mass shell, p+ = (p_perp^2 + m^2)/(4 p-)."""
    fr = front_state(xplus, xminus, xperp, pminus, pperp)
    return extended_state(xplus, xminus, xperp, hamiltonian_front(fr, bg),
                          pminus, pperp, s=s)


def covariant_state(x: FourVector, xdot: FourVector, tau: float = 0.0,
                    require_unit: bool = True) -> PhaseSpaceState:
    n2 = xdot.norm2()
    if require_unit and abs(n2 - 1.0) > 1e-8:
        raise ValueError(f"xdot.xdot = {n2:.3e} must equal 1 for a covariant state")
    return PhaseSpaceState("covariant", tau, x.as_array(), xdot.as_array())


# ---------------------------------------------------------------------------
# Hamiltonians
# ---------------------------------------------------------------------------

def hamiltonian_instant(state: PhaseSpaceState, bg) -> float:
    """Positive root H = sqrt(p.p + m^2(t, x))."""
    m2 = bg.m2(state.position())
    return float(np.sqrt(float(state.p @ state.p) + m2))


def hamiltonian_front(state: PhaseSpaceState, bg) -> float:
    """H = p+ on shell = (p_perp.p_perp + m^2)/(4 p-)."""
    pminus = state.p[0]
    if pminus == 0.0:
        raise SingularityError("front-form Hamiltonian undefined at p- = 0")
    m2 = bg.m2(state.position())
    pp = float(state.p[1] ** 2 + state.p[2] ** 2)
    return float((pp + m2) / (4.0 * pminus))


def hamiltonian_extended(state: PhaseSpaceState, bg) -> float:
    """K = (p_perp.p_perp + m^2(x))/(4 p-) - p+; vanishes on shell."""
    pplus, pminus = state.p[0], state.p[1]
    if pminus == 0.0:
        raise SingularityError("extended Hamiltonian undefined at p- = 0")
    m2 = bg.m2(state.position())
    pp = float(state.p[2] ** 2 + state.p[3] ** 2)
    return float((pp + m2) / (4.0 * pminus) - pplus)


def hamiltonian_nonrel(state: PhaseSpaceState, bg) -> float:
    """Nonrelativistic reduction H = p.p/(2 m) + m of the instant form."""
    m = bg.mass(state.position())
    return float(state.p @ state.p / (2.0 * m) + m)


# ---------------------------------------------------------------------------
# Poisson brackets
# ---------------------------------------------------------------------------

def _value_fn(f) -> Callable:
    return f.func if hasattr(f, "func") else f


def _fd_partials(f, state: PhaseSpaceState, bg, h_scale: float):
    fn = _value_fn(f)
    nq, npp = state.q.size, state.p.size
    dq = np.zeros(nq)
    dp = np.zeros(npp)
    for k in range(nq):
        h = h_scale * max(1.0, abs(state.q[k]))
        qp, qm = state.q.copy(), state.q.copy()
        qp[k] += h
        qm[k] -= h
        dq[k] = (fn(state.replace(q=qp), bg) - fn(state.replace(q=qm), bg)) / (2 * h)
    for k in range(npp):
        h = h_scale * max(1.0, abs(state.p[k]))
        pp_, pm = state.p.copy(), state.p.copy()
        pp_[k] += h
        pm[k] -= h
        dp[k] = (fn(state.replace(p=pp_), bg) - fn(state.replace(p=pm), bg)) / (2 * h)
    return dq, dp


def quantity_partials(f, state: PhaseSpaceState, bg, h_scale: float = 1e-6):
    """(dQ/dq, dQ/dp) of a quantity at a state: closed form when the quantity
    provides it, second-order central differences otherwise."""
    pf = getattr(f, "partials", None)
    if pf is not None:
        return pf(state, bg)
    return _fd_partials(f, state, bg, h_scale)


def poisson_bracket(f, g, state: PhaseSpaceState, bg, h_scale: float = 1e-6) -> float:
    """{f, g} = df/dq.dg/dp - df/dp.dg/dq over the canonical pairs of the
    state's form (pairs are matched by position in q and p; the extended form
    includes the (x+, p+) pair)."""
    if state.form == "covariant":
        raise ValueError("the covariant form carries no canonical bracket here")
    dqf, dpf = quantity_partials(f, state, bg, h_scale)
    dqg, dpg = quantity_partials(g, state, bg, h_scale)
    return float(dqf @ dpg - dpf @ dqg)


# ---------------------------------------------------------------------------
# flows
# ---------------------------------------------------------------------------

def _rhs_instant(bg, nonrel: bool):
    def rhs(t, y):
        pos = FourVector(t, y[0], y[1], y[2])
        p = y[3:6]
        m2 = bg.m2(pos)
        g = bg.grad_m2(pos)
        if nonrel:
            m = np.sqrt(m2)
            fac = (1.0 - (p @ p) / (2.0 * m2)) / (2.0 * m)
            return np.concatenate([-p / m, g[1:4] * fac])
        H = np.sqrt(p @ p + m2)
        return np.concatenate([-p / H, g[1:4] / (2.0 * H)])
    return rhs


def _rhs_front(bg):
    def rhs(t, y):
        pos = FourVector(0.5 * (t + y[0]), y[1], y[2], 0.5 * (t - y[0]))
        pminus, p1, p2 = y[3], y[4], y[5]
        m2 = bg.m2(pos)
        lfg = lf_gradient(bg.grad_m2(pos))
        pp = p1 * p1 + p2 * p2
        return np.array([
            (pp + m2) / (4.0 * pminus ** 2),
            -p1 / (2.0 * pminus),
            -p2 / (2.0 * pminus),
            lfg[1] / (4.0 * pminus),
            lfg[2] / (4.0 * pminus),
            lfg[3] / (4.0 * pminus),
        ])
    return rhs


def _rhs_extended(bg):
    def rhs(s, y):
        xplus, xminus = y[0], y[1]
        pos = FourVector(0.5 * (xplus + xminus), y[2], y[3],
                         0.5 * (xplus - xminus))
        pminus, p1, p2 = y[5], y[6], y[7]
        m2 = bg.m2(pos)
        lfg = lf_gradient(bg.grad_m2(pos))
        pp = p1 * p1 + p2 * p2
        return np.array([
            1.0,
            (pp + m2) / (4.0 * pminus ** 2),
            -p1 / (2.0 * pminus),
            -p2 / (2.0 * pminus),
            lfg[0] / (4.0 * pminus),
            lfg[1] / (4.0 * pminus),
            lfg[2] / (4.0 * pminus),
            lfg[3] / (4.0 * pminus),
        ])
    return rhs


def _rhs_covariant(bg):
    def rhs(tau, y):
        pos = FourVector(*y[0:4])
        u = y[4:8]
        m2 = bg.m2(pos)
        g = bg.grad_m2(pos)
        gu = raise_index(g)
        udot = (gu - u * float(u @ g)) / (2.0 * m2)
        return np.concatenate([u, udot])
    return rhs


def _make_rhs(form: str, bg, nonrel: bool):
    if form == "instant":
        return _rhs_instant(bg, nonrel)
    if nonrel:
        raise ValueError("the nonrelativistic flow applies to the instant form")
    if form == "front":
        return _rhs_front(bg)
    if form == "extended":
        return _rhs_extended(bg)
    return _rhs_covariant(bg)


def _position_of(form: str, t: float, y: np.ndarray) -> FourVector:
    if form == "instant":
        return FourVector(t, y[0], y[1], y[2])
    if form == "front":
        return FourVector(0.5 * (t + y[0]), y[1], y[2], 0.5 * (t - y[0]))
    if form == "extended":
        return FourVector(0.5 * (y[0] + y[1]), y[2], y[3], 0.5 * (y[0] - y[1]))
    return FourVector(*y[0:4])


def _split(form: str, y: np.ndarray):
    n = {"instant": 3, "front": 3, "extended": 4, "covariant": 4}[form]
    return y[:n], y[n:]


@dataclass
class EvolveOptions:
    rtol: float = 1e-10
    atol: float = 1e-10
    method: str = "rk45"           # "rk45" (adaptive 5(4)) or "rk4" (fixed step)
    step: Optional[float] = None   # fixed step for rk4
    samples: int = 400
    max_step: float = np.inf
    events: bool = True
    nonrelativistic: bool = False
    max_segments: int = 64


@dataclass
class Trajectory:
    """Sampled flow output with monitored quantities and drift statistics."""

    form: str
    times: np.ndarray
    q: np.ndarray
    p: np.ndarray
    background: str
    quantities: dict = field(default_factory=dict)
    drifts: dict = field(default_factory=dict)
    events_log: list = field(default_factory=list)
    stats: dict = field(default_factory=dict)
    nonrelativistic: bool = False

    def __len__(self):
        return self.times.size

    def state(self, i: int) -> PhaseSpaceState:
        return PhaseSpaceState(self.form, self.times[i], self.q[i], self.p[i])

    def states(self):
        return [self.state(i) for i in range(len(self))]

    def column_names(self):
        names = {
            "instant": (["x", "y", "z"], ["p1", "p2", "p3"]),
            "front": (["xminus", "x1", "x2"], ["pminus", "p1", "p2"]),
            "extended": (["xplus", "xminus", "x1", "x2"],
                         ["pplus", "pminus", "p1", "p2"]),
            "covariant": (["x0", "x1", "x2", "x3"], ["u0", "u1", "u2", "u3"]),
        }[self.form]
        tname = {"instant": "t", "front": "xplus", "extended": "s",
                 "covariant": "tau"}[self.form]
        return tname, names[0], names[1]

    def to_csv(self, path):
        tname, qn, pn = self.column_names()
        labels = list(self.quantities)
        with open(path, "w") as fh:
            fh.write(",".join([tname] + qn + pn + labels) + "\n")
            for i in range(len(self)):
                row = ([self.times[i]] + list(self.q[i]) + list(self.p[i])
                       + [self.quantities[l][i] for l in labels])
                fh.write(",".join(f"{v:.17g}" for v in row) + "\n")

    def to_json(self, path):
        tname, qn, pn = self.column_names()
        doc = {
            "form": self.form,
            "background": self.background,
            "nonrelativistic": self.nonrelativistic,
            "columns": [tname] + qn + pn,
            "samples": [[self.times[i]] + list(map(float, self.q[i]))
                        + list(map(float, self.p[i])) for i in range(len(self))],
            "quantities": {k: list(map(float, v)) for k, v in self.quantities.items()},
            "drifts": {k: float(v) for k, v in self.drifts.items()},
            "events": [[name, float(t)] for name, t in self.events_log],
            "stats": self.stats,
        }
        with open(path, "w") as fh:
            json.dump(doc, fh, indent=1)


def monitor(traj: Trajectory, quantities: Sequence, bg):
    """Evaluate quantities along a trajectory's samples; returns (values,
    drifts) where drift = max_t |Q(t) - Q(0)| / max(1, |Q(0)|).  Pure: the
    report only depends on the stored samples."""
    values = {}
    drifts = {}
    for quant in quantities:
        fn = _value_fn(quant)
        lab = getattr(quant, "label", getattr(quant, "__name__", "Q"))
        vals = np.array([fn(traj.state(i), bg) for i in range(len(traj))])
        values[lab] = vals
        drifts[lab] = float(np.max(np.abs(vals - vals[0])) / max(1.0, abs(vals[0])))
    return values, drifts


def _rk4_step(rhs, t, y, h):
    k1 = rhs(t, y)
    k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1)
    k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2)
    k4 = rhs(t + h, y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _evolve_rk4(state0, bg, span, opts, rhs, grid):
    if opts.step is None:
        raise ValueError("fixed-step integration needs opts.step")
    if bg.events and opts.events:
        raise ValueError("the fixed-step integrator does not locate events; "
                         "disable them or use the adaptive method")
    t0, t1 = span
    ts = [t0]
    ys = [np.asarray(np.concatenate([state0.q, state0.p]), float)]
    t, y = t0, ys[0]
    nsteps = int(np.ceil((t1 - t0) / opts.step))
    h = (t1 - t0) / nsteps
    for _ in range(nsteps):
        y = _rk4_step(rhs, t, y, h)
        t = t + h
        ts.append(t)
        ys.append(y)
    ts = np.asarray(ts)
    ys = np.asarray(ys)
    # subsample onto the requested grid by nearest step time
    idx = np.searchsorted(ts, grid)
    idx = np.clip(idx, 0, ts.size - 1)
    return ts[idx], ys[idx], {"nfev": 4 * nsteps, "segments": 1}, []


def evolve(state0: PhaseSpaceState, bg, span, opts: Optional[EvolveOptions] = None,
           monitors: Sequence = ()) -> Trajectory:
    """Integrate the state's form of dynamics over span = (t0, t1).

    Switch surfaces declared by the background terminate the step, are located
    by bisection, and the integration restarts on the far side, so C0 kinks
    never sit inside an accepted step.  A sign change of p- (front/extended)
    raises SingularityError; sampling m^2 < 0 raises RealityError from the
    background itself.
    """
    opts = opts or EvolveOptions()
    t0, t1 = float(span[0]), float(span[1])
    if t1 <= t0:
        raise ValueError("span must run forward")
    if abs(state0.time - t0) > 1e-12 * max(1.0, abs(t0)):
        raise ValueError("state0.time must equal span[0]")
    rhs = _make_rhs(state0.form, bg, opts.nonrelativistic)
    grid = np.linspace(t0, t1, opts.samples)

    if opts.method == "rk4":
        times, ys, stats, elog = _evolve_rk4(state0, bg, span, opts, rhs, grid)
    elif opts.method == "rk45":
        times, ys, stats, elog = _evolve_rk45(state0, bg, (t0, t1), opts, rhs, grid)
    else:
        raise ValueError(f"unknown method {opts.method!r}")

    qs, ps = [], []
    for y in ys:
        q, p = _split(state0.form, y)
        qs.append(q)
        ps.append(p)
    traj = Trajectory(form=state0.form, times=np.asarray(times),
                      q=np.asarray(qs), p=np.asarray(ps),
                      background=bg.label, events_log=elog, stats=stats,
                      nonrelativistic=opts.nonrelativistic)
    if monitors:
        traj.quantities, traj.drifts = monitor(traj, monitors, bg)
    return traj


def _evolve_rk45(state0, bg, span, opts, rhs, grid):
    t0, t1 = span
    span_len = t1 - t0
    nudge = 1e-12 * span_len

    surface_events = []
    if opts.events:
        for name, fn in bg.events:
            def ev(t, y, _fn=fn, _form=state0.form):
                return _fn(_position_of(_form, t, y))
            ev.terminal = True
            surface_events.append((name, ev))

    guard_events = []
    if state0.form in ("front", "extended"):
        ip = {"front": 3, "extended": 5}[state0.form]

        def pminus_guard(t, y, _i=ip):
            return y[_i]
        pminus_guard.terminal = True
        guard_events.append(("p-=0", pminus_guard))

    all_events = surface_events + guard_events
    ev_fns = [e for _, e in all_events]

    times = [t0]
    ys = [np.asarray(np.concatenate([state0.q, state0.p]), float)]
    t, y = t0, ys[0]
    elog = []
    nfev = 0
    segments = 0

    while t < t1 - 1e-14 * span_len:
        # step off a switch surface so the event does not refire at the start
        on_surface = any(abs(fn(t, y)) < 1e-13 * max(1.0, span_len)
                         for _, fn in all_events)
        if on_surface:
            y = _rk4_step(rhs, t, y, nudge)
            t = t + nudge
            nfev += 4
        seg_grid = grid[(grid > t + 1e-14 * span_len) & (grid <= t1)]
        t_eval = np.concatenate([[t], seg_grid]) if seg_grid.size else np.array([t, t1])
        sol = solve_ivp(rhs, (t, t1), y, method="RK45", rtol=opts.rtol,
                        atol=opts.atol, max_step=opts.max_step,
                        t_eval=t_eval, events=ev_fns, dense_output=False)
        nfev += sol.nfev
        segments += 1
        if segments > opts.max_segments:
            raise SingularityError("too many event restarts; flow appears stuck "
                                   "on a switch surface")
        keep = sol.t > times[-1] + 1e-14 * max(1.0, span_len)
        for ti, yi in zip(sol.t[keep], sol.y[:, keep].T):
            times.append(ti)
            ys.append(yi)
        if sol.status == 1:  # terminated by an event
            hit = [i for i, te in enumerate(sol.t_events) if te.size > 0]
            i0 = hit[int(np.argmin([sol.t_events[i][0] for i in hit]))]
            name = all_events[i0][0]
            te = float(sol.t_events[i0][0])
            ye = sol.y_events[i0][0]
            if i0 >= len(surface_events):
                raise SingularityError(
                    f"guard {name} crossed at parameter {te:g}; the flow left "
                    "its regular region")
            elog.append((name, te))
            if te > times[-1] + 1e-14 * max(1.0, span_len):
                times.append(te)
                ys.append(ye)
            t, y = te, ye
        elif sol.status == 0:
            t = t1
            if times[-1] < t1 - 1e-14 * span_len:
                times.append(sol.t[-1])
                ys.append(sol.y[:, -1])
            break
        else:
            raise SingularityError(f"integration failed: {sol.message}")

    stats = {"nfev": int(nfev), "segments": int(segments),
             "event_crossings": len(elog)}
    return np.asarray(times), np.asarray(ys), stats, elog


def evolve_covariant(x0: FourVector, xdot0: FourVector, bg, span,
                     opts: Optional[EvolveOptions] = None,
                     monitors: Sequence = ()) -> Trajectory:
    """Covariant flow from initial position and unit four-velocity."""
    st = covariant_state(x0, xdot0, tau=float(span[0]))
    return evolve(st, bg, span, opts, monitors)


# ---------------------------------------------------------------------------
# form conversions
# ---------------------------------------------------------------------------

def instant_to_covariant(state: PhaseSpaceState, bg) -> PhaseSpaceState:
    if state.form != "instant":
        raise ValueError("expected an instant-form state")
    p4 = state.four_momentum(bg)
    m = bg.mass(state.position())
    u = raise_index(p4) / m
    return covariant_state(state.position(), FourVector.from_array(u), tau=0.0)


def covariant_to_instant(state: PhaseSpaceState, bg) -> PhaseSpaceState:
    if state.form != "covariant":
        raise ValueError("expected a covariant state")
    p4 = state.four_momentum(bg)
    x = state.position()
    return instant_state(x.t, [x.x, x.y, x.z], p4[1:4])


def instant_to_front(state: PhaseSpaceState, bg) -> PhaseSpaceState:
    if state.form != "instant":
        raise ValueError("expected an instant-form state")
    x = state.position()
    p4 = state.four_momentum(bg)
    pplus, pminus = 0.5 * (p4[0] + p4[3]), 0.5 * (p4[0] - p4[3])
    return front_state(x.xplus, x.xminus, [x.x, x.y], pminus, p4[1:3])


def front_to_extended(state: PhaseSpaceState, bg, s: float = 0.0) -> PhaseSpaceState:
    if state.form != "front":
        raise ValueError("expected a front-form state")
    return extended_state_on_shell(bg, state.time, state.q[0], state.q[1:3],
                                   state.p[0], state.p[1:3], s=s)
