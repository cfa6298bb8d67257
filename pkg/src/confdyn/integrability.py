"""Functional independence, involution, and superintegrability certification.

A system with n degrees of freedom and r functionally independent constants
of motion, n of which are mutually in involution, is integrable for r = n and
superintegrable for r = n + k with k >= 1: minimally so at k = 1, maximally
at k = n - 1.  Independence is certified by the numerical rank of the
Jacobian of the constants with respect to the phase-space variables (SVD with
a relative threshold), voted across a sample of states so single degenerate
points cannot skew the result; involution by the maximum absolute Poisson
bracket over the same states.
"""

from __future__ import annotations

import itertools
import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .dynamics import PhaseSpaceState, poisson_bracket, quantity_partials

_DOF = {"instant": 3, "front": 3, "extended": 4}


def quantity_jacobian(quantities: Sequence, state: PhaseSpaceState, bg) -> np.ndarray:
    """Rows are (dQ/dq, dQ/dp) of each quantity at the state."""
    rows = []
    for quant in quantities:
        dq, dp = quantity_partials(quant, state, bg)
        rows.append(np.concatenate([dq, dp]))
    return np.asarray(rows)


def _svd_rank(mat: np.ndarray, tol: float) -> tuple[int, np.ndarray]:
    s = np.linalg.svd(mat, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0, s
    return int(np.sum(s > tol * s[0])), s


@dataclass
class IndependenceReport:
    labels: list
    ranks: list
    rank: int
    singular_values: np.ndarray  # at the first sampled state
    tol: float

    @property
    def unanimous(self) -> bool:
        return all(r == self.rank for r in self.ranks)

    def to_dict(self):
        return {"labels": self.labels, "rank": self.rank, "ranks": self.ranks,
                "singular_values": [float(s) for s in self.singular_values],
                "tol": self.tol, "unanimous": self.unanimous}


def independence_rank(quantities: Sequence, states: Sequence[PhaseSpaceState],
                      bg, tol: float = 1e-8) -> IndependenceReport:
    """Numerical rank of the quantity Jacobian, majority-voted over states."""
    if not states:
        raise ValueError("need at least one state")
    ranks = []
    sv0 = None
    for st in states:
        r, s = _svd_rank(quantity_jacobian(quantities, st, bg), tol)
        ranks.append(r)
        if sv0 is None:
            sv0 = s
    rank = Counter(ranks).most_common(1)[0][0]
    labels = [getattr(q, "label", f"Q{i+1}") for i, q in enumerate(quantities)]
    return IndependenceReport(labels, ranks, rank, sv0, tol)


@dataclass
class InvolutionTable:
    labels: list
    brackets: np.ndarray  # max |{Qi, Qj}| over the sampled states
    tol: float

    def pair(self, i: int, j: int) -> float:
        return float(self.brackets[i, j])

    def is_involutive(self, idx: Sequence[int]) -> bool:
        idx = list(idx)
        return all(self.brackets[i, j] <= self.tol
                   for i, j in itertools.combinations(idx, 2))

    def involutive_pairs(self):
        n = len(self.labels)
        return [(self.labels[i], self.labels[j])
                for i, j in itertools.combinations(range(n), 2)
                if self.brackets[i, j] <= self.tol]

    def to_dict(self):
        return {"labels": self.labels, "tol": self.tol,
                "brackets": [[float(v) for v in row] for row in self.brackets]}


def involution_table(quantities: Sequence, states: Sequence[PhaseSpaceState],
                     bg, tol: float = 1e-9) -> InvolutionTable:
    """Pairwise Poisson brackets, maximized in magnitude over the states."""
    if not states:
        raise ValueError("need at least one state")
    n = len(quantities)
    out = np.zeros((n, n))
    for st in states:
        for i, j in itertools.combinations(range(n), 2):
            b = abs(poisson_bracket(quantities[i], quantities[j], st, bg))
            if b > out[i, j]:
                out[i, j] = b
                out[j, i] = b
    labels = [getattr(q, "label", f"Q{i+1}") for i, q in enumerate(quantities)]
    return InvolutionTable(labels, out, tol)


@dataclass
class Certification:
    label: str
    rank: int
    dof: int
    extra: int                      # k = rank - dof (when certified)
    involutive_subset: list
    independence: IndependenceReport
    involution: InvolutionTable

    def to_dict(self):
        return {"label": self.label, "rank": self.rank, "dof": self.dof,
                "extra": self.extra, "involutive_subset": self.involutive_subset,
                "independence": self.independence.to_dict(),
                "involution": self.involution.to_dict()}

    def to_json(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=1)


def classify(quantities: Sequence, states: Sequence[PhaseSpaceState], bg,
             rank_tol: float = 1e-8, bracket_tol: float = 1e-9) -> Certification:
    """Certify (super)integrability of a quantity set on sampled states.

    Requires r = rank(quantities) >= n and an n-element subset that is both
    mutually in involution and itself of full rank n; the label then follows
    from k = r - n.  Returns "not certified" when either requirement fails.
    """
    form = states[0].form
    if form not in _DOF:
        raise ValueError(f"no canonical structure for form {form!r}")
    n = _DOF[form]
    indep = independence_rank(quantities, states, bg, rank_tol)
    invol = involution_table(quantities, states, bg, bracket_tol)
    r = indep.rank

    subset = None
    if r >= n and len(quantities) >= n:
        for idx in itertools.combinations(range(len(quantities)), n):
            if not invol.is_involutive(idx):
                continue
            sub = [quantities[i] for i in idx]
            if independence_rank(sub, states, bg, rank_tol).rank == n:
                subset = [invol.labels[i] for i in idx]
                break

    if subset is None:
        label = "not certified"
        k = 0
    else:
        k = r - n
        if k <= 0:
            label = "integrable"
        elif k >= n - 1:
            label = "maximally superintegrable"
        elif k == 1:
            label = "minimally superintegrable"
        else:
            label = "superintegrable"

    return Certification(label, r, n, k, subset or [], indep, invol)


def random_states(form: str, count: int, rng: np.random.Generator,
                  q_range: tuple = (-1.0, 1.0), p_range: tuple = (-0.5, 0.5),
                  pminus_range: tuple = (0.2, 1.0),
                  xplus_range: tuple = (0.5, 1.5),
                  t_range: tuple = (-1.0, 1.0),
                  accept=None, max_tries: int = 1000) -> list:
    """Seeded sample of non-degenerate states for rank/involution voting.

    p- is kept away from zero (front/extended) and x+ positive (extended) so
    the light-front charts and the inverse-square backgrounds stay regular;
    an accept predicate can restrict further (e.g. interior of the light
    cone).  Raises if the predicate rejects too often.
    """
    out = []
    tries = 0
    while len(out) < count:
        tries += 1
        if tries > max_tries:
            raise ValueError("accept predicate rejected too many samples")
        if form == "instant":
            st = PhaseSpaceState("instant", rng.uniform(*t_range),
                                 rng.uniform(*q_range, size=3),
                                 rng.uniform(*p_range, size=3))
        elif form == "front":
            q = rng.uniform(*q_range, size=3)
            p = np.concatenate([[rng.uniform(*pminus_range)],
                                rng.uniform(*p_range, size=2)])
            st = PhaseSpaceState("front", rng.uniform(*xplus_range), q, p)
        elif form == "extended":
            q = np.concatenate([[rng.uniform(*xplus_range)],
                                rng.uniform(*q_range, size=3)])
            p = np.concatenate([rng.uniform(*p_range, size=1),
                                [rng.uniform(*pminus_range)],
                                rng.uniform(*p_range, size=2)])
            st = PhaseSpaceState("extended", 0.0, q, p)
        else:
            raise ValueError(f"no sampler for form {form!r}")
        if accept is None or accept(st):
            out.append(st)
    return out
