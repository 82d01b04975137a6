"""Brute-force local-hidden-variable feasibility oracle.

A correlation table (joint outcome distributions for every pair of
measurement settings) admits a local model exactly when it is a convex
combination of deterministic strategies, each of which fixes one
outcome per setting per party.  Feasibility is decided by linear
programming over the strategy weights; an infeasible table comes with a
separating linear functional whose value is <= 0 on every deterministic
strategy and strictly positive on the table.

Floating-point LP verdicts close to the polytope boundary are re-decided
with an exact phase-1 simplex over rationals, so a verdict never flips
on solver rounding.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.optimize import linprog

from .discrimination import joint_distribution
from .errors import TableInvalid
from .qstate import BipartiteKet

DIST_SUM_TOL = 1e-9
NONNEG_TOL = 1e-12
NO_SIGNALING_TOL = 1e-9
# Below this separation-margin magnitude the float verdict is re-decided
# exactly over rationals.
EXACT_FALLBACK_MARGIN = 1e-7
MAX_STRATEGIES = 10_000


@dataclass(frozen=True)
class CorrelationTable:
    """Outcome labels per setting per party plus all joint distributions.

    ``cells`` is a canonically ordered tuple of
    (setting1, setting2, outcome1, outcome2, probability).
    """

    party1_settings: tuple  # of (name, (labels...))
    party2_settings: tuple
    cells: tuple

    def __post_init__(self):
        self._validate()

    def distribution(self, s1: str, s2: str) -> dict:
        return {(o1, o2): p for (n1, n2, o1, o2, p) in self.cells
                if n1 == s1 and n2 == s2}

    def _validate(self) -> None:
        labels1 = dict(self.party1_settings)
        labels2 = dict(self.party2_settings)
        for n1, _ in self.party1_settings:
            for n2, _ in self.party2_settings:
                dist = self.distribution(n1, n2)
                expected = {(o1, o2) for o1 in labels1[n1] for o2 in labels2[n2]}
                if set(dist) != expected:
                    raise TableInvalid(f"missing cells for pair ({n1}, {n2})")
                total = sum(dist.values())
                if abs(total - 1.0) > DIST_SUM_TOL:
                    raise TableInvalid(
                        f"pair ({n1}, {n2}) sums to {total:.12g}, not 1")
                if min(dist.values()) < -NONNEG_TOL:
                    raise TableInvalid(f"negative probability in pair ({n1}, {n2})")
        # No-signaling: each party's marginal per setting must not depend
        # on the other party's setting choice.
        for n1, outs1 in self.party1_settings:
            margs = []
            for n2, _ in self.party2_settings:
                dist = self.distribution(n1, n2)
                margs.append([sum(p for (o1, _o2), p in dist.items() if o1 == o)
                              for o in outs1])
            for other in margs[1:]:
                if max(abs(x - y) for x, y in zip(margs[0], other)) > NO_SIGNALING_TOL:
                    raise TableInvalid(f"signaling in particle-1 marginal of {n1}")
        for n2, outs2 in self.party2_settings:
            margs = []
            for n1, _ in self.party1_settings:
                dist = self.distribution(n1, n2)
                margs.append([sum(p for (_o1, o2), p in dist.items() if o2 == o)
                              for o in outs2])
            for other in margs[1:]:
                if max(abs(x - y) for x, y in zip(margs[0], other)) > NO_SIGNALING_TOL:
                    raise TableInvalid(f"signaling in particle-2 marginal of {n2}")

    def to_obj(self) -> dict:
        return {
            "party1_settings": [{"name": n, "outcomes": list(o)}
                                for n, o in self.party1_settings],
            "party2_settings": [{"name": n, "outcomes": list(o)}
                                for n, o in self.party2_settings],
            "cells": [{"setting1": n1, "setting2": n2, "outcome1": o1,
                       "outcome2": o2, "p": p}
                      for n1, n2, o1, o2, p in self.cells],
        }


def correlation_table(psi: BipartiteKet, party1: tuple, party2: tuple) -> CorrelationTable:
    """Fill every settings-pair distribution from the state.

    ``party1`` may mix projective and generalized settings; ``party2``
    must be projective.
    """
    cells = []
    p1_sig = []
    p2_sig = []
    for s1 in party1:
        p1_sig.append((s1.name, tuple(s1.labels)))
    for s2 in party2:
        p2_sig.append((s2.name, tuple(s2.labels)))
    for s1 in party1:
        for s2 in party2:
            dist = joint_distribution(psi, s1, s2)
            for (o1, o2), p in sorted(dist.items()):
                cells.append((s1.name, s2.name, o1, o2, float(p)))
    return CorrelationTable(tuple(p1_sig), tuple(p2_sig), tuple(cells))


@dataclass(frozen=True)
class LhvVerdict:
    feasible: bool
    exact_arithmetic: bool
    weights: tuple | None        # of (strategy_key, weight) if feasible
    certificate: dict | None     # {"functional", "offset", "margin"} if not
    residual: float | None       # max table-reproduction error of the weights

    def to_obj(self) -> dict:
        obj = {
            "feasible": self.feasible,
            "exact_arithmetic": self.exact_arithmetic,
        }
        if self.weights is not None:
            obj["weights"] = [{"strategy": list(k), "weight": w}
                              for k, w in self.weights if w > 0.0]
            obj["residual"] = self.residual
        if self.certificate is not None:
            obj["certificate"] = self.certificate
        return obj


def _strategies(table: CorrelationTable):
    """All deterministic strategy pairs, as tuples of outcome labels
    ordered like (party1 settings..., party2 settings...)."""
    outs1 = [outs for _, outs in table.party1_settings]
    outs2 = [outs for _, outs in table.party2_settings]
    combos1 = list(itertools.product(*outs1))
    combos2 = list(itertools.product(*outs2))
    if len(combos1) * len(combos2) > MAX_STRATEGIES:
        raise TableInvalid("strategy enumeration exceeds the supported size")
    return [c1 + c2 for c1 in combos1 for c2 in combos2]


def _cell_index(table: CorrelationTable) -> list:
    return [(n1, n2, o1, o2) for (n1, n2, o1, o2, _p) in table.cells]


def _strategy_matrix(table: CorrelationTable):
    """0/1 matrix with one column per strategy, one row per table cell."""
    strategies = _strategies(table)
    cells = _cell_index(table)
    names1 = [n for n, _ in table.party1_settings]
    names2 = [n for n, _ in table.party2_settings]
    n1 = len(names1)
    a = np.zeros((len(cells), len(strategies)))
    for j, strat in enumerate(strategies):
        assign1 = dict(zip(names1, strat[:n1]))
        assign2 = dict(zip(names2, strat[n1:]))
        for i, (s1, s2, o1, o2) in enumerate(cells):
            if assign1[s1] == o1 and assign2[s2] == o2:
                a[i, j] = 1.0
    return a, strategies, cells


def _separation_margin(a: np.ndarray, p: np.ndarray):
    """Best separating functional with sup-norm bound 1.

    Maximizes y.p - t subject to y.a_s <= t for every strategy column.
    The optimum is always >= 0 (y = 0 scores zero); it is strictly
    positive exactly when the table lies outside the strategy polytope.
    The offset is recomputed from the returned y so that
    y.a_s - offset <= 0 holds by construction.
    """
    n_cells, n_strats = a.shape
    # variables: y (n_cells, bounded in [-1, 1]) and the free threshold t
    c = np.concatenate([-p, [1.0]])
    a_ub = np.hstack([a.T, -np.ones((n_strats, 1))])
    b_ub = np.zeros(n_strats)
    bounds = [(-1.0, 1.0)] * n_cells + [(None, None)]
    res = linprog(c, A_ub=a_ub, b_ub=b_ub, bounds=bounds, method="highs")
    if not res.success:
        raise TableInvalid(f"separation LP failed: {res.message}")
    y = res.x[:n_cells]
    offset = float((y @ a).max())
    margin = float(y @ p - offset)
    return margin, y, offset


# --- exact rational phase-1 simplex -----------------------------------

# L1 slack below which an exactly-solved table counts as feasible; a
# float table rounds the ideal quantum one at the 1e-16 level, so exact
# equality is the wrong test near the boundary.
EXACT_RESIDUAL_TOL = Fraction(1, 10 ** 9)


def _exact_phase1(a_cols: list, rhs: list):
    """Minimize the L1 slack of { A w + s+ - s- = p, w, s >= 0 } exactly.

    Returns (True, weights, slack) when the optimal slack is within
    EXACT_RESIDUAL_TOL (the table is reproducible up to its own stated
    tolerance), else (False, farkas, slack) with a Farkas vector
    satisfying y.A <= 0 componentwise and y.p = slack > 0.  Bland's rule
    keeps the pivoting finite.
    """
    m = len(rhs)
    n = len(a_cols)
    rhs = [Fraction(x) if x >= 0 else Fraction(0) for x in rhs]
    # columns: n strategies, m positive slacks, m negative slacks, rhs
    width = n + 2 * m + 1
    tab = [[Fraction(0)] * width for _ in range(m)]
    for i in range(m):
        for j in range(n):
            tab[i][j] = Fraction(a_cols[j][i])
        tab[i][n + i] = Fraction(1)
        tab[i][n + m + i] = Fraction(-1)
        tab[i][width - 1] = rhs[i]
    basis = [n + i for i in range(m)]
    cost = [Fraction(0)] * (n + 2 * m)
    for j in range(n, n + 2 * m):
        cost[j] = Fraction(1)

    def reduced_costs():
        # z_j - c_j for the slack-minimization objective
        rc = []
        for j in range(n + 2 * m):
            z = sum(cost[basis[i]] * tab[i][j] for i in range(m))
            rc.append(z - cost[j])
        return rc

    while True:
        rc = reduced_costs()
        enter = next((j for j in range(n + 2 * m) if rc[j] > 0), None)
        if enter is None:
            break
        ratios = [(tab[i][width - 1] / tab[i][enter], i)
                  for i in range(m) if tab[i][enter] > 0]
        if not ratios:
            break  # minimization of a sum of nonnegatives never unbounded
        _, leave = min(ratios, key=lambda pair: (pair[0], basis[pair[1]]))
        piv = tab[leave][enter]
        tab[leave] = [x / piv for x in tab[leave]]
        for i in range(m):
            if i != leave and tab[i][enter] != 0:
                f = tab[i][enter]
                tab[i] = [x - f * y for x, y in zip(tab[i], tab[leave])]
        basis[leave] = enter

    slack = sum(cost[basis[i]] * tab[i][width - 1] for i in range(m))
    if slack <= EXACT_RESIDUAL_TOL:
        weights = [Fraction(0)] * n
        for i, b in enumerate(basis):
            if b < n:
                weights[b] = tab[i][width - 1]
        return True, weights, slack
    # Farkas vector from the duals: for the i-th positive slack column
    # rc = y_i - 1, so y_i = rc + 1; then y.A <= 0 and y.p = slack > 0.
    rc = reduced_costs()
    farkas = [rc[n + i] + 1 for i in range(m)]
    return False, farkas, slack


def lhv_feasible(table: CorrelationTable) -> LhvVerdict:
    """Decide local-model feasibility with a witness either way."""
    a, strategies, cells = _strategy_matrix(table)
    p = np.array([c[4] for c in table.cells])
    p = np.clip(p, 0.0, None)

    margin, y, offset = _separation_margin(a, p)

    if margin >= EXACT_FALLBACK_MARGIN:
        cert = {
            "functional": {f"{n1}|{n2}|{o1}|{o2}": float(v)
                           for (n1, n2, o1, o2), v in zip(cells, y)},
            "offset": offset,
            "margin": margin,
        }
        return LhvVerdict(False, False, None, cert, None)

    # Margin indistinguishable from zero in floating point: the table is
    # on or near the polytope boundary, so decide exactly.
    a_cols = [[int(a[i, j]) for i in range(a.shape[0])] for j in range(a.shape[1])]
    feasible, witness, _slack = _exact_phase1(a_cols, [Fraction(x) for x in p])
    if feasible:
        w = np.array([float(x) for x in witness])
        residual = float(np.abs(a @ w - p).max())
        weights = tuple((strategies[j], float(w[j])) for j in range(len(strategies)))
        return LhvVerdict(True, True, weights, None, residual)
    yv = np.array([float(x) for x in witness])
    strat_vals = yv @ a
    exact_margin = float(yv @ p - strat_vals.max())
    cert = {
        "functional": {f"{n1}|{n2}|{o1}|{o2}": float(v)
                       for (n1, n2, o1, o2), v in zip(cells, yv)},
        "offset": float(strat_vals.max()),
        "margin": exact_margin,
    }
    return LhvVerdict(False, True, None, cert, None)
