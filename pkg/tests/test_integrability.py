"""Independence ranks, involution tables, and certification labels."""

import numpy as np
import pytest

from confdyn import backgrounds, conformal, integrability
from confdyn.conformal import ConservedQuantity, generator_quantity, quantity_product
from confdyn.dynamics import extended_state_on_shell
from confdyn.integrability import (
    classify,
    independence_rank,
    involution_table,
    random_states,
)


def _spacelike_states(count=24, seed=3):
    rng = np.random.default_rng(seed)
    bg = backgrounds.linear_z(1.0, 1.0, switched=False)
    states = random_states("instant", count, rng,
                           accept=lambda st: bg.m2(st.position()) > 0.05)
    return bg, states


def _reshelled(bg, states):
    # involution of a charge algebra that closes on the mass shell is an
    # on-shell statement: project the sampled states back onto 4 p+ p- = ...
    return [extended_state_on_shell(bg, st.q[0], st.q[1], st.q[2:4],
                                    st.p[1], st.p[2:4], s=st.time)
            for st in states]


# ---------------------------------------------------------------------------
# spacelike linear field
# ---------------------------------------------------------------------------

def test_spacelike_bracket_table_frozen():
    bg, states = _spacelike_states()
    tab = involution_table(conformal.spacelike_set(1.0), states, bg, tol=1e-9)
    # hand-derived algebra: {Q1,Q3} = {Q2,Q4} = -B, everything else closes
    assert tab.pair(0, 2) == pytest.approx(1.0, rel=1e-9)
    assert tab.pair(1, 3) == pytest.approx(1.0, rel=1e-9)
    zero_pairs = [(0, 1), (0, 3), (0, 4), (1, 2), (1, 4),
                  (2, 3), (2, 4), (3, 4)]
    for i, j in zero_pairs:
        assert tab.pair(i, j) < 1e-9, (i, j)
    assert tab.is_involutive([0, 1, 4])
    assert not tab.is_involutive([0, 2, 4])
    assert ("Q1", "Q2") in tab.involutive_pairs()


def test_spacelike_maximally_superintegrable():
    bg, states = _spacelike_states()
    cert = classify(conformal.spacelike_set(1.0), states, bg)
    assert cert.rank == 5
    assert cert.dof == 3
    assert cert.extra == 2
    assert cert.label == "maximally superintegrable"
    assert cert.involutive_subset == ["Q1", "Q2", "Q5"]
    assert cert.independence.unanimous


def test_rank_invariant_under_recombination():
    # rescaling and squaring members must not change the Jacobian rank
    bg, states = _spacelike_states()
    q1, q2, q3, q4, q5 = conformal.spacelike_set(1.0)
    b = 2.0

    def scaled(q, label):
        parts = None
        if q.partials is not None:
            parts = lambda s, bgr=None: tuple(x / b for x in q.partials(s, bgr))
        return ConservedQuantity(label, lambda s, bgr=None: q.func(s, bgr) / b,
                                 parts)

    recombined = [scaled(q3, "F1"), scaled(q4, "F2"),
                  scaled(quantity_product(q5, q5, "Q5sq"), "F3"), q1, q2]
    r0 = independence_rank(conformal.spacelike_set(1.0), states, bg)
    r1 = independence_rank(recombined, states, bg)
    assert r0.rank == r1.rank == 5


def test_duplicated_quantity_drops_rank():
    bg, states = _spacelike_states(count=10, seed=5)
    p1 = generator_quantity(conformal.translation_axis(1), "A")
    p1_again = generator_quantity(conformal.translation_axis(1), "B")
    h = conformal.spacelike_set(1.0)[4]
    rep = independence_rank([p1, p1_again, h], states, bg)
    assert rep.rank == 2


# ---------------------------------------------------------------------------
# free particle and truncated sets
# ---------------------------------------------------------------------------

def test_free_momenta_integrable():
    rng = np.random.default_rng(9)
    bg = backgrounds.constant(1.0)
    states = random_states("instant", 12, rng)
    qs = [generator_quantity(conformal.translation_axis(j), f"P{j}")
          for j in (1, 2, 3)]
    cert = classify(qs, states, bg)
    assert cert.rank == 3
    assert cert.label == "integrable"
    assert sorted(cert.involutive_subset) == ["P1", "P2", "P3"]


def test_truncated_set_not_certified():
    rng = np.random.default_rng(10)
    bg = backgrounds.constant(1.0)
    states = random_states("instant", 12, rng)
    qs = [generator_quantity(conformal.translation_axis(j), f"P{j}")
          for j in (1, 2)]
    cert = classify(qs, states, bg)
    assert cert.rank == 2
    assert cert.label == "not certified"
    assert cert.involutive_subset == []


# ---------------------------------------------------------------------------
# plane-wave extended algebra
# ---------------------------------------------------------------------------

def test_planewave_extended_rank_seven():
    rng = np.random.default_rng(12)
    bg = backgrounds.plane_wave_sin2(1.0, 0.5, 1.0)
    states = _reshelled(bg, random_states("extended", 20, rng))
    cert = classify(conformal.planewave_extended_set(bg), states, bg)
    assert cert.rank == 7
    assert cert.dof == 4
    assert cert.extra == 3
    assert cert.label == "maximally superintegrable"
    assert cert.involutive_subset == ["Q1", "Q2", "Q3", "Q6"]


def test_planewave_mass_shell_vanishes_on_shell():
    rng = np.random.default_rng(13)
    bg = backgrounds.plane_wave_sin2(1.0, 0.5, 1.0)
    q6 = conformal.planewave_extended_set(bg)[5]
    for st in _reshelled(bg, random_states("extended", 10, rng)):
        assert abs(q6(st, bg)) < 1e-10


# ---------------------------------------------------------------------------
# conformal inverse-square algebra
# ---------------------------------------------------------------------------

def test_conformal_extended_minimally_superintegrable():
    rng = np.random.default_rng(14)
    bg = backgrounds.special_conformal_gaussian(1.0, 1.0, 1.0)
    states = _reshelled(bg, random_states("extended", 20, rng))
    cert = classify(conformal.conformal_extended_set(bg), states, bg)
    assert cert.rank == 5
    assert cert.dof == 4
    assert cert.extra == 1
    assert cert.label == "minimally superintegrable"
    assert cert.involutive_subset == ["Q1", "Q2", "Q3", "K"]


def test_conformal_involution_needs_mass_shell():
    # off-shell extended states leak a bracket proportional to the constraint
    rng = np.random.default_rng(15)
    bg = backgrounds.special_conformal_gaussian(1.0, 1.0, 1.0)
    raw = random_states("extended", 6, rng)
    qs = conformal.conformal_extended_set(bg)
    off = involution_table(qs, raw, bg, tol=1e-9)
    assert off.pair(2, 4) > 1e-3  # {Q3, K} before projection
    on = involution_table(qs, _reshelled(bg, raw), bg, tol=1e-9)
    assert on.pair(2, 4) < 1e-9


def test_conformal_front_charges_independent():
    rng = np.random.default_rng(16)
    bg = backgrounds.special_conformal_gaussian(1.0, 1.0, 1.0)
    states = random_states("front", 15, rng)
    qs = conformal.conformal_front_set()
    rep = independence_rank(qs, states, bg)
    assert rep.rank == 4
    tab = involution_table(qs, states, bg, tol=1e-8)
    assert tab.is_involutive([0, 1, 2])


# ---------------------------------------------------------------------------
# sampling helpers and errors
# ---------------------------------------------------------------------------

def test_random_states_accept_and_reproducible():
    states = random_states("instant", 8, np.random.default_rng(21),
                           accept=lambda st: st.q[2] > 0.0)
    assert len(states) == 8
    assert all(st.q[2] > 0.0 for st in states)
    again = random_states("instant", 8, np.random.default_rng(21),
                          accept=lambda st: st.q[2] > 0.0)
    for a, b in zip(states, again):
        assert np.array_equal(a.q, b.q) and np.array_equal(a.p, b.p)


def test_random_states_exhausts_tries():
    with pytest.raises(ValueError):
        random_states("instant", 3, np.random.default_rng(22),
                      accept=lambda st: False, max_tries=50)


def test_empty_state_list_rejected():
    bg = backgrounds.constant(1.0)
    qs = conformal.spacelike_set(1.0)
    with pytest.raises(ValueError):
        independence_rank(qs, [], bg)
    with pytest.raises(ValueError):
        involution_table(qs, [], bg)


def test_certification_json_roundtrip(tmp_path):
    import json
    bg, states = _spacelike_states(count=8, seed=30)
    cert = classify(conformal.spacelike_set(1.0), states, bg)
    path = tmp_path / "cert.json"
    cert.to_json(path)
    blob = json.loads(path.read_text())
    assert blob["label"] == cert.label
    assert blob["rank"] == 5
    assert blob["independence"]["unanimous"] is True
    assert len(blob["involution"]["brackets"]) == 5
