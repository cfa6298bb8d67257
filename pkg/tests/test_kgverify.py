"""Wave-equation residuals, symmetry eigenmodes, and convergence ratios."""

import numpy as np
import pytest

from confdyn import backgrounds, conformal
from confdyn.analytic import planewave_orbit
from confdyn.dynamics import front_state
from confdyn.errors import DomainError, SingularityError
from confdyn.geometry import FourVector, LightFrontCoords, from_lightfront
from confdyn.kgverify import (
    Wavefunction,
    commutator_identity_defect,
    eigen_defect,
    kg_residual,
    make_conformal_solution,
    make_dilation_solution,
    make_planewave_solution,
    ode_residual_conformal,
    ode_residual_planewave,
    phase_gradient,
    residual_convergence,
    symmetry_apply,
    write_convergence_csv,
)

# residuals are dominated by evaluator roundoff amplified by 1/h^2 once the
# truncation term drops near 1e-8, so the stencil stays at 5e-3
_H = 5e-3


def _cartesian_points(rng, n, t_range=(-1.0, 1.0), r=1.0):
    pts = []
    for _ in range(n):
        t = rng.uniform(*t_range)
        x, y, z = rng.uniform(-r, r, 3)
        pts.append(FourVector(t, x, y, z))
    return pts


def _conformal_points(rng, n):
    pts = []
    for _ in range(n):
        lf = LightFrontCoords(rng.uniform(0.7, 1.6), rng.uniform(-0.5, 0.5),
                              rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4))
        pts.append(from_lightfront(lf))
    return pts


def _cone_points(rng, n):
    pts = []
    for _ in range(n):
        t = rng.uniform(1.8, 2.6)
        x, y, z = rng.uniform(-0.4, 0.4, 3)
        pts.append(FourVector(t, x, y, z))
    return pts


# ---------------------------------------------------------------------------
# free modes and the off-shell control
# ---------------------------------------------------------------------------

def test_free_mode_second_order_convergence():
    bg = backgrounds.constant(1.69)
    phi = make_planewave_solution((0.3, -0.2), 0.8, bg)
    rng = np.random.default_rng(41)
    rows = residual_convergence(phi, bg, _cartesian_points(rng, 8), h=_H)
    for _, h, r1, r2, ratio in rows:
        assert r1 < 1e-4
        assert 3.9 < ratio < 4.1


def test_free_mode_fourth_order_stencil():
    bg = backgrounds.constant(1.0)
    phi = make_planewave_solution((0.1, 0.2), 0.6, bg)
    x = FourVector(0.3, -0.2, 0.4, 0.1)
    r2 = abs(kg_residual(phi, bg, x, h=0.02, order=2))
    r4 = abs(kg_residual(phi, bg, x, h=0.02, order=4))
    assert r4 < r2 / 50.0
    with pytest.raises(ValueError):
        kg_residual(phi, bg, x, order=3)


def test_off_shell_control_plateaus():
    bg = backgrounds.constant(1.0)
    p = np.array([1.3, 0.2, -0.1, 0.3])  # p.p = 1.55 != 1
    gap = 1.0 - (p[0] ** 2 - p[1] ** 2 - p[2] ** 2 - p[3] ** 2)
    phi = Wavefunction("offshell", lambda x: np.exp(
        -1j * (p[0] * x.t + p[1] * x.x + p[2] * x.y + p[3] * x.z)))
    rng = np.random.default_rng(42)
    rows = residual_convergence(phi, bg, _cartesian_points(rng, 6), h=_H)
    for _, h, r1, r2, ratio in rows:
        # residual sits at |m^2 - p.p| instead of shrinking
        assert r1 == pytest.approx(abs(gap), rel=1e-3)
        assert 0.95 < ratio < 1.05


# ---------------------------------------------------------------------------
# plane-wave family
# ---------------------------------------------------------------------------

def test_planewave_mode_on_profile():
    bg = backgrounds.plane_wave_sin2(1.0, 0.5, 1.0)
    phi = make_planewave_solution((0.25, -0.15), 0.6, bg)
    rng = np.random.default_rng(43)
    rows = residual_convergence(phi, bg, _cartesian_points(rng, 8), h=_H)
    for _, h, r1, r2, ratio in rows:
        assert 3.5 < ratio < 4.5
    chi = phi.params["chi"]
    m2 = lambda w: 1.0 * (1.0 + 0.5 * np.sin(w) ** 2)
    res = ode_residual_planewave(chi, (0.25, -0.15), 0.6, m2,
                                 np.linspace(-1.0, 1.0, 9))
    assert res < 1e-7


def test_planewave_mode_validation():
    bg = backgrounds.plane_wave_sin2(1.0, 0.5, 1.0)
    with pytest.raises(ValueError):
        make_planewave_solution((0.1, 0.2), 0.0, bg)


def test_planewave_eigen_defects():
    bg = backgrounds.plane_wave_sin2(1.0, 0.5, 1.0)
    q1, q2, qm = 0.25, -0.15, 0.6
    phi = make_planewave_solution((q1, q2), qm, bg)
    rng = np.random.default_rng(44)
    pts = _cartesian_points(rng, 6)
    triples = [(conformal.translation_axis(1), q1),
               (conformal.translation_axis(2), q2),
               (conformal.translation_xminus(), qm)]
    for gen, Q in triples:
        d1 = eigen_defect(gen, phi, Q, pts, h=1e-3)
        d2 = eigen_defect(gen, phi, Q, pts, h=5e-4)
        assert d1 < 1e-5
        assert d1 / d2 == pytest.approx(4.0, abs=1.0)  # O(h^2) decay
    # a wrong eigenvalue cannot be talked away by refining the stencil
    bad = eigen_defect(conformal.translation_axis(1), phi, q1 + 0.5, pts,
                       h=1e-3)
    assert bad > 0.1


# ---------------------------------------------------------------------------
# conformal family
# ---------------------------------------------------------------------------

def test_conformal_mode_on_gaussian():
    bg = backgrounds.special_conformal_gaussian(1.0, 1.0, 1.0)
    f = lambda u: np.exp(-u * u)
    phi = make_conformal_solution((0.25, -0.15), 0.8, f)
    rng = np.random.default_rng(45)
    rows = residual_convergence(phi, bg, _conformal_points(rng, 8), h=_H)
    for _, h, r1, r2, ratio in rows:
        assert 3.5 < ratio < 4.5
    res = ode_residual_conformal(phi.params["g"], (0.25, -0.15), 0.8, f,
                                 np.linspace(-0.6, 0.6, 9))
    assert res < 1e-7


def test_conformal_mode_eigen_defects():
    f = lambda u: np.exp(-u * u)
    q1, q2, q3 = 0.25, -0.15, 0.8
    phi = make_conformal_solution((q1, q2), q3, f)
    rng = np.random.default_rng(46)
    pts = _conformal_points(rng, 5)
    triples = [(conformal.special_conformal_lf(), q3),
               (conformal.null_rotation_t(1), q1),
               (conformal.null_rotation_t(2), q2)]
    for gen, Q in triples:
        d1 = eigen_defect(gen, phi, Q, pts, h=1e-3)
        d2 = eigen_defect(gen, phi, Q, pts, h=5e-4)
        assert d1 < 1e-4
        assert d1 / d2 == pytest.approx(4.0, abs=1.0)
        assert eigen_defect(gen, phi, Q + 0.5, pts, h=1e-3) > 0.1


def test_conformal_mode_validation():
    f = lambda u: np.exp(-u * u)
    with pytest.raises(ValueError):
        make_conformal_solution((0.1, 0.2), 0.0, f)
    phi = make_conformal_solution((0.1, 0.2), 0.5, f)
    with pytest.raises(SingularityError):
        phi(FourVector(0.0, 0.0, 0.0, -0.5))  # x+ < 0
    bg = backgrounds.special_conformal_gaussian(1.0, 1.0, 1.0)
    with pytest.raises(DomainError) as err:
        # the stencil would cross x+ = 0
        kg_residual(phi, bg, FourVector(0.0025, 0.3, -0.2, 0.0025), h=_H)
    assert "leaves the domain" in str(err.value)


# ---------------------------------------------------------------------------
# dilation family
# ---------------------------------------------------------------------------

def test_dilation_mode_bessel_branch():
    bg = backgrounds.dilation_mass(1.0)
    phi = make_dilation_solution((0.25, -0.15), 0.8, 1.0)
    assert phi.params["alpha"] == pytest.approx(0.6)
    rng = np.random.default_rng(47)
    rows = residual_convergence(phi, bg, _cone_points(rng, 8), h=_H)
    for _, h, r1, r2, ratio in rows:
        assert 3.5 < ratio < 4.5


def test_dilation_mode_complex_order():
    # csq < Q3^2 sends the Bessel order imaginary; the mode must still solve
    bg = backgrounds.dilation_mass(0.04)
    phi = make_dilation_solution((0.25, -0.15), 0.8, 0.04)
    assert abs(phi.params["alpha"].real) < 1e-12
    rng = np.random.default_rng(48)
    rows = residual_convergence(phi, bg, _cone_points(rng, 2), h=_H)
    for _, h, r1, r2, ratio in rows:
        assert 3.5 < ratio < 4.5


def test_dilation_mode_euler_limit():
    # Q_perp = 0 collapses the radial equation to an Euler power law
    phi = make_dilation_solution((0.0, 0.0), 0.8, 1.0)
    alpha = 0.6
    q3 = 0.8
    for x in (FourVector(2.0, 0.1, -0.2, 0.3), FourVector(2.4, 0.0, 0.0, -0.5)):
        v = np.sqrt(x.norm2()) / x.xplus
        direct = x.xplus ** (-(1.0 + 1j * q3)) * v ** (-1j * q3) * v ** alpha
        assert phi(x) == pytest.approx(direct, rel=1e-12)


def test_dilation_eigen_defect():
    phi = make_dilation_solution((0.25, -0.15), 0.8, 1.0)
    rng = np.random.default_rng(49)
    pts = _cone_points(rng, 5)
    d = eigen_defect(conformal.dilation(), phi, 0.8, pts, h=1e-3)
    assert d < 1e-4
    assert eigen_defect(conformal.dilation(), phi, 1.3, pts, h=1e-3) > 0.1


def test_dilation_mode_validation():
    with pytest.raises(ValueError):
        make_dilation_solution((0.1, 0.2), 0.8, -1.0)
    phi = make_dilation_solution((0.1, 0.2), 0.8, 1.0)
    with pytest.raises(SingularityError):
        phi(FourVector(0.1, 1.0, 0.0, 0.0))  # spacelike point
    assert not phi.in_domain(FourVector(0.1, 1.0, 0.0, 0.0))


# ---------------------------------------------------------------------------
# operator identity, phase transport, reporting
# ---------------------------------------------------------------------------

def test_commutator_identity_any_generator():
    bg = backgrounds.plane_wave_sin2(1.0, 0.5, 1.0)
    phi = make_planewave_solution((0.25, -0.15), 0.6, bg)
    x = FourVector(0.3, -0.1, 0.2, 0.4)
    # the identity holds for symmetries and non-symmetries alike
    for gen in (conformal.translation_xminus(), conformal.translation_xplus()):
        assert commutator_identity_defect(gen, bg, phi, x, h=_H) < 5e-3
    # but only the x- translation has a vanishing symmetry defect
    assert conformal.symmetry_defect(conformal.translation_xminus(), bg, x) < 1e-12
    assert conformal.symmetry_defect(conformal.translation_xplus(), bg, x) > 0.1


def test_phase_gradient_matches_orbit_momentum():
    # Hamilton-Jacobi transport: the mode's phase gradient is the classical
    # four-momentum along the orbit with the same charges
    bg = backgrounds.plane_wave_sin2(1.0, 0.5, 1.0)
    q1, q2, qm = 0.25, -0.15, 0.6
    phi = make_planewave_solution((q1, q2), qm, bg)
    orb = planewave_orbit(bg, front_state(0.2, 0.1, (0.3, -0.2), qm, (q1, q2)))
    for xp in (0.5, 1.3, 2.2):
        x = orb.position(xp)
        grad = phase_gradient(phi, x, h=1e-4)
        assert np.max(np.abs(grad - orb.momentum(xp))) < 1e-6


def test_symmetry_apply_is_linear():
    bg = backgrounds.constant(1.0)
    a = make_planewave_solution((0.1, 0.2), 0.5, bg)
    b = make_planewave_solution((-0.2, 0.1), 0.7, bg)
    comb = Wavefunction("combo", lambda x: 2.0 * a(x) - 1j * b(x))
    gen = conformal.boost_z()
    x = FourVector(0.2, 0.4, -0.3, 0.1)
    lhs = symmetry_apply(gen, comb, x)
    rhs = 2.0 * symmetry_apply(gen, a, x) - 1j * symmetry_apply(gen, b, x)
    assert lhs == pytest.approx(rhs, abs=1e-12)


def test_kg_residual_refuses_switch_surface():
    bg = backgrounds.linear_z(1.0, 1.0, switched=True)
    phi = Wavefunction("anything", lambda x: np.exp(-1j * x.t))
    with pytest.raises(DomainError) as err:
        kg_residual(phi, bg, FourVector(0.5, 0.1, 0.2, 0.0))
    assert "switch surface" in str(err.value)


def test_convergence_csv_roundtrip(tmp_path):
    bg = backgrounds.constant(1.0)
    phi = make_planewave_solution((0.1, -0.2), 0.5, bg)
    rng = np.random.default_rng(50)
    rows = residual_convergence(phi, bg, _cartesian_points(rng, 3), h=_H)
    path = tmp_path / "conv.csv"
    write_convergence_csv(path, rows)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "point,h,residual_h,residual_h2,ratio"
    assert len(lines) == 4
    first = lines[1].split(",")
    assert int(first[0]) == 0
    assert float(first[1]) == _H
    assert float(first[4]) == pytest.approx(rows[0][2] / rows[0][3], rel=1e-12)
