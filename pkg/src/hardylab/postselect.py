"""Generalized ladder arguments under post-selection, the inconclusive
event probabilities by two independent routes, the gap inequalities, and
the parameter sweep.

Replacing the first-particle von Neumann measurement by unambiguous
discrimination introduces an inconclusive outcome, so each version of
the argument must discard one event class:

* ladder-ordering "hardy":      discard (inconclusive_1, circled_minus_2);
* ladder-ordering "goldstein":  discard (inconclusive_1, hat_minus_2).

A post-selection-free conclusion requires the contradiction probability
P(circled_minus_1, circled_minus_2) to exceed the probability of the
discarded class; ``gaps`` reports both differences.  For the maximally
entangled slice theta = pi/2 the closed forms collapse to

    gap = sin^2(alpha - beta)/2 - |sin(alpha - beta)|/2 <= 0,

so neither inequality is ever satisfied there.  For smaller theta the
sweep records where the gaps do turn positive; those results are
reported as data, not asserted against any external claim.

Every probability is computed two ways: a trace against the explicit
inconclusive-outcome operator, and the closed-form decomposition into a
marginal minus the conclusive joint terms.  The direct state
computation is always the primary truth; closed forms are checked
against it.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

import numpy as np

from .discrimination import (
    LABEL_INCONCLUSIVE,
    LABEL_MINUS,
    LABEL_PLUS,
    PovmSetting,
    ProjectiveSetting,
    joint_distribution,
    ud_povm,
)
from .errors import EmptyGrid
from .geometry import (
    ProofAngles,
    build_bases,
    derive_arrays,
    derive_geometry,
)
from .hardy import HardyParams, hardy_state
from .ledger import TARGET_POSITIVE, Ledger, make_entry
from .qstate import joint_prob, povm_joint_prob

GENERALIZED_TOL = 1e-10
ROUTE_TOL = 1e-12
VANISHING_TOL = 1e-15
# Default keep-away distance from the singular sets for sweep grids.
SWEEP_MARGIN = 1e-6

VERSION_HARDY = "hardy"
VERSION_GOLDSTEIN = "goldstein"


def _proof_settings(p: ProofAngles):
    """The four measurement settings of the generalized argument."""
    g = derive_geometry(p)
    bases = build_bases(p, g)
    a1 = PovmSetting("A1", ud_povm(bases.hat_plus_1, bases.hat_minus_1))
    b1 = ProjectiveSetting("B1", ((LABEL_PLUS, bases.oplus_1),
                                  (LABEL_MINUS, bases.ominus_1)))
    a2 = ProjectiveSetting("A2", ((LABEL_PLUS, bases.hat_plus_2),
                                  (LABEL_MINUS, bases.hat_minus_2)))
    b2 = ProjectiveSetting("B2", ((LABEL_PLUS, bases.oplus_2),
                                  (LABEL_MINUS, bases.ominus_2)))
    return g, bases, a1, b1, a2, b2


def _discard(dist: dict, cell) -> dict:
    """Renormalize a joint distribution after removing one outcome cell."""
    kept = {k: v for k, v in dist.items() if k != cell}
    total = sum(kept.values())
    if total <= 0.0:
        return {k: 0.0 for k in kept}
    return {k: v / total for k, v in kept.items()}


def _conditional_from(dist: dict, outcome_index: int, outcome_label: str,
                      given_index: int, given_label: str) -> float | None:
    """P(outcome | given) within one settings-pair distribution."""
    marginal = sum(v for k, v in dist.items() if k[given_index] == given_label)
    if marginal <= VANISHING_TOL:
        return None
    joint = sum(v for k, v in dist.items()
                if k[given_index] == given_label and k[outcome_index] == outcome_label)
    return joint / marginal


def generalized_ledger(p: ProofAngles, version: str) -> Ledger:
    """The four probability claims of the chosen version, computed from
    the state and the discrimination measurement with the version's
    discard rule applied exactly as a conditional renormalization."""
    psi = hardy_state(p.theta)
    _, _, a1, b1, a2, b2 = _proof_settings(p)

    d_b1a2 = joint_distribution(psi, b1, a2)
    d_a1b2 = joint_distribution(psi, a1, b2)
    d_a1a2 = joint_distribution(psi, a1, a2)
    d_b1b2 = joint_distribution(psi, b1, b2)

    if version == VERSION_HARDY:
        # Discard runs with an inconclusive first outcome alongside
        # circled_minus on particle 2.
        d_a1b2_sel = _discard(d_a1b2, (LABEL_INCONCLUSIVE, LABEL_MINUS))
        c1 = _conditional_from(d_b1a2, 1, LABEL_MINUS, 0, LABEL_MINUS)
        c2 = _conditional_from(d_a1b2_sel, 0, LABEL_MINUS, 1, LABEL_MINUS)
        j3 = d_a1a2[(LABEL_MINUS, LABEL_MINUS)]
        j4 = d_b1b2[(LABEL_MINUS, LABEL_MINUS)]
        entries = (
            make_entry("GH1", "P(hat-_2 | circled-_1)", c1, 1.0, GENERALIZED_TOL),
            make_entry("GH2", "P(hat-_1 | circled-_2, selected)", c2, 1.0, GENERALIZED_TOL),
            make_entry("GH3", "P(hat-_1, hat-_2)", j3, 0.0, GENERALIZED_TOL),
            make_entry("GH4", "P(circled-_1, circled-_2)", j4, TARGET_POSITIVE,
                       VANISHING_TOL),
        )
    elif version == VERSION_GOLDSTEIN:
        # Discard runs with an inconclusive first outcome alongside
        # hat_minus on particle 2.
        d_a1a2_sel = _discard(d_a1a2, (LABEL_INCONCLUSIVE, LABEL_MINUS))
        j1 = d_a1a2_sel[(LABEL_MINUS, LABEL_MINUS)]
        c2 = _conditional_from(d_b1a2, 0, LABEL_PLUS, 1, LABEL_PLUS)
        c3 = _conditional_from(d_a1b2, 1, LABEL_PLUS, 0, LABEL_PLUS)
        j4 = d_b1b2[(LABEL_MINUS, LABEL_MINUS)]
        entries = (
            make_entry("GG1", "P(hat-_1, hat-_2 | selected)", j1, 0.0, GENERALIZED_TOL),
            make_entry("GG2", "P(circled+_1 | hat+_2)", c2, 1.0, GENERALIZED_TOL),
            make_entry("GG3", "P(circled+_2 | hat+_1 conclusive)", c3, 1.0,
                       GENERALIZED_TOL),
            make_entry("GG4", "P(circled-_1, circled-_2)", j4, TARGET_POSITIVE,
                       VANISHING_TOL),
        )
    else:
        raise ValueError(f"unknown version {version!r}")

    applicable = entries[3].passed
    notes = () if applicable else ("vanishing contradiction probability",)
    return Ledger(f"generalized-{version}", entries, applicable=applicable, notes=notes)


class RoutePair(NamedTuple):
    via_trace: float
    via_decomposition: float


def p_inconclusive_minus(p: ProofAngles) -> RoutePair:
    """P(inconclusive_1, hat_minus_2) by two independent routes.

    Trace route: expectation of the inconclusive operator tensored with
    the hat_minus projector.  Decomposition route: the hat_minus_2
    marginal minus the conclusive joint terms, all from closed forms.
    """
    psi = hardy_state(p.theta)
    g, bases, a1, _, _, _ = _proof_settings(p)
    via_trace = povm_joint_prob(psi, a1.povm.element(LABEL_INCONCLUSIVE),
                                bases.hat_minus_2)

    hp = HardyParams(p.theta)
    a, b = hp.a, hp.b
    s_ov = abs(p.overlap)
    marg = (-a * math.sin(g.gamma) + b * math.cos(g.gamma)) ** 2 \
        + (b * math.sin(g.gamma)) ** 2
    conclusive_plus = (1.0 - s_ov) * (g.scale * g.c_pm) ** 2
    # The (hat_minus_1, hat_minus_2) term vanishes identically.
    via_dec = marg - conclusive_plus - 0.0
    return RoutePair(via_trace, via_dec)


def p_inconclusive_ominus(p: ProofAngles) -> RoutePair:
    """P(inconclusive_1, circled_minus_2) by the same two routes."""
    psi = hardy_state(p.theta)
    g, bases, a1, _, _, _ = _proof_settings(p)
    via_trace = povm_joint_prob(psi, a1.povm.element(LABEL_INCONCLUSIVE),
                                bases.ominus_2)

    hp = HardyParams(p.theta)
    a, b = hp.a, hp.b
    s_ov = abs(p.overlap)
    ang = g.gamma + g.epsilon  # circled_minus_2 is a rotation by gamma+epsilon
    marg = (-a * math.sin(ang) + b * math.cos(ang)) ** 2 + (b * math.sin(ang)) ** 2
    conclusive_minus = (1.0 - s_ov) * (g.scale * g.c_mp * math.sin(g.epsilon)) ** 2
    # The (hat_plus_1, circled_minus_2) term vanishes identically.
    via_dec = marg - 0.0 - conclusive_minus
    return RoutePair(via_trace, via_dec)


@dataclass(frozen=True)
class GapReport:
    theta: float
    alpha: float
    beta: float
    version: str
    p_contradiction: float
    p_inapplicable: float
    gap: float

    def to_obj(self) -> dict:
        return {
            "theta": self.theta, "alpha": self.alpha, "beta": self.beta,
            "version": self.version,
            "p_contradiction": self.p_contradiction,
            "p_inapplicable": self.p_inapplicable,
            "gap": self.gap,
        }


def gaps(p: ProofAngles) -> tuple[GapReport, GapReport]:
    """Contradiction-minus-inapplicable gap for both versions.

    The contradiction probability is taken from the direct state
    computation; the inapplicable-event probabilities from the trace
    route (both cross-checked against their closed forms elsewhere).
    """
    psi = hardy_state(p.theta)
    g = derive_geometry(p)
    bases = build_bases(p, g)
    p_contr = joint_prob(psi, bases.ominus_1, bases.ominus_2)
    p_inc_min = p_inconclusive_minus(p).via_trace
    p_inc_omin = p_inconclusive_ominus(p).via_trace
    hardy_rep = GapReport(p.theta, p.alpha, p.beta, VERSION_HARDY,
                          p_contr, p_inc_omin, p_contr - p_inc_omin)
    goldstein_rep = GapReport(p.theta, p.alpha, p.beta, VERSION_GOLDSTEIN,
                              p_contr, p_inc_min, p_contr - p_inc_min)
    return hardy_rep, goldstein_rep


# ---------------------------------------------------------------------------
# Vectorized kernel shared by the sweep and the bulk cross-validation.

def batch_quantities(theta: float, alpha: np.ndarray, beta: np.ndarray) -> dict:
    """Closed-form per-point quantities, vectorized over (alpha, beta).

    Returns the contradiction probability, both inconclusive-event
    probabilities, both gaps, and the deviation statistics for the two
    internally inconsistent closed-form variants.
    """
    d = derive_arrays(theta, alpha, beta)
    s_ov = np.abs(np.sin(np.asarray(alpha) - np.asarray(beta)))
    p_contr = d["p_ominus_joint"]
    p_inc_min = s_ov * (d["scale"] * d["c_pm"]) ** 2
    p_inc_omin = s_ov * (d["scale"] * d["c_mp"] * np.sin(d["epsilon"])) ** 2
    return {
        "p_contradiction": p_contr,
        "p_inconclusive_minus": p_inc_min,
        "p_inconclusive_ominus": p_inc_omin,
        "gap_hardy": p_contr - p_inc_omin,
        "gap_goldstein": p_contr - p_inc_min,
        "joint_cos_variant_deviation": np.abs(d["p_ominus_cos_variant"] - p_contr),
        "delta_variant_deviation": d["delta_variant_deviation"],
    }


def cross_validate_routes(thetas: np.ndarray, alphas: np.ndarray,
                          betas: np.ndarray) -> dict:
    """Bulk agreement check between independent computation routes.

    For every sample point this compares (a) the closed-form
    contradiction probability against a direct inner product of the
    state with the circled measurement directions, and (b) the
    trace-route inconclusive probabilities (built from the explicit
    discrimination operator) against the closed-form decompositions.
    Returns the maximum absolute deviations.
    """
    th = np.asarray(thetas, dtype=float)
    al = np.asarray(alphas, dtype=float)
    be = np.asarray(betas, dtype=float)
    a = np.cos(th)
    b = np.sin(th) / math.sqrt(2.0)

    cot_g = math.sqrt(2.0) * np.cos(th) / np.sin(th) - np.cos(al) / np.sin(al)
    gamma = np.arctan2(1.0, cot_g)
    c_pp = a * np.cos(be) * np.cos(gamma) + b * np.sin(be + gamma)
    c_pm = -a * np.cos(be) * np.sin(gamma) + b * np.cos(be + gamma)
    c_mp = -a * np.sin(al) * np.cos(gamma) + b * np.cos(al + gamma)
    scale = 1.0 / np.cos(al - be)
    epsilon = np.arctan2(c_pm, c_pp)
    delta = np.arctan2(c_pp * np.sin(al) + c_mp * np.cos(be),
                       c_pp * np.cos(al) - c_mp * np.sin(be))
    s_ov = np.abs(np.sin(al - be))

    mm_closed = (scale * c_mp * np.sin(epsilon) * np.cos(delta - be)) ** 2

    # Direct route: stack the state amplitudes and the two circled
    # directions and take the inner product outright.
    n = th.shape[0]
    psi = np.zeros((n, 2, 2))
    psi[:, 0, 0] = a
    psi[:, 0, 1] = b
    psi[:, 1, 0] = b
    om1 = np.stack([-np.sin(delta), np.cos(delta)], axis=1)
    ang2 = gamma + epsilon
    om2 = np.stack([-np.sin(ang2), np.cos(ang2)], axis=1)
    mm_direct = np.einsum("ni,nij,nj->n", om1, psi, om2) ** 2

    # Trace route for the inconclusive probabilities: sandwich the
    # explicit inconclusive operator between conditional vectors.
    hat_p = np.stack([np.cos(al), np.sin(al)], axis=1)
    hat_m = np.stack([-np.sin(be), np.cos(be)], axis=1)
    proj_p = np.einsum("ni,nj->nij", hat_p, hat_p)
    proj_m = np.einsum("ni,nj->nij", hat_m, hat_m)
    eye = np.broadcast_to(np.eye(2), (n, 2, 2))
    e_inc = eye - (2.0 * eye - proj_p - proj_m) / (1.0 + s_ov)[:, None, None]

    m2 = np.stack([-np.sin(gamma), np.cos(gamma)], axis=1)
    w = np.einsum("nij,nj->ni", psi, m2)
    inc_minus_trace = np.einsum("ni,nij,nj->n", w, e_inc, w)
    w2 = np.einsum("nij,nj->ni", psi, om2)
    inc_ominus_trace = np.einsum("ni,nij,nj->n", w2, e_inc, w2)

    marg_m2 = (-a * np.sin(gamma) + b * np.cos(gamma)) ** 2 + (b * np.sin(gamma)) ** 2
    inc_minus_dec = marg_m2 - (1.0 - s_ov) * (scale * c_pm) ** 2
    marg_om2 = (-a * np.sin(ang2) + b * np.cos(ang2)) ** 2 + (b * np.sin(ang2)) ** 2
    inc_ominus_dec = marg_om2 - (1.0 - s_ov) * (scale * c_mp * np.sin(epsilon)) ** 2

    return {
        "max_dev_contradiction": float(np.abs(mm_closed - mm_direct).max()),
        "max_dev_inconclusive_minus": float(np.abs(inc_minus_trace - inc_minus_dec).max()),
        "max_dev_inconclusive_ominus": float(np.abs(inc_ominus_trace - inc_ominus_dec).max()),
    }


# ---------------------------------------------------------------------------
# Sweep engine.

@dataclass(frozen=True)
class GridSpec:
    """Rectangular (alpha, beta) grid per theta slice over (0, pi)^2.

    Points within ``margin`` of a singular set (sin(alpha) = 0, overlap
    magnitude 1, overlap 0) are masked out.
    """

    theta_values: tuple
    alpha_steps: int
    beta_steps: int
    margin: float = SWEEP_MARGIN

    def __post_init__(self):
        if not self.theta_values or self.alpha_steps < 1 or self.beta_steps < 1:
            raise EmptyGrid("grid specification is empty")
        for th in self.theta_values:
            if not (0.0 < th <= math.pi / 2):
                raise EmptyGrid(f"theta={th!r} outside (0, pi/2]")

    def alphas(self) -> np.ndarray:
        return np.linspace(self.margin, math.pi - self.margin, self.alpha_steps)

    def betas(self) -> np.ndarray:
        return np.linspace(self.margin, math.pi - self.margin, self.beta_steps)

    def to_obj(self) -> dict:
        return {
            "theta_values": list(self.theta_values),
            "alpha_steps": self.alpha_steps,
            "beta_steps": self.beta_steps,
            "margin": self.margin,
            "alpha_domain": [self.margin, math.pi - self.margin],
            "beta_domain": [self.margin, math.pi - self.margin],
        }


def admissible_mask(alpha: np.ndarray, beta: np.ndarray, margin: float) -> np.ndarray:
    """True where a point keeps clear of every singular set."""
    u = alpha - beta
    return (np.abs(np.sin(alpha)) >= margin) \
        & (np.abs(np.cos(u)) >= margin) \
        & (np.abs(np.sin(u)) >= margin)


@dataclass(frozen=True)
class ExtremePoint:
    value: float
    theta: float
    alpha: float
    beta: float
    index: int  # linear grid index; breaks ties deterministically

    def better_than(self, other: "ExtremePoint") -> bool:
        if self.value != other.value:
            return self.value > other.value
        return self.index < other.index


_NEG_INF_POINT = ExtremePoint(-math.inf, math.nan, math.nan, math.nan, 2 ** 62)


@dataclass
class SliceStats:
    """Aggregated statistics for one theta slice (merge-friendly)."""

    theta: float
    admissible_points: int = 0
    max_gap_hardy: ExtremePoint = field(default_factory=lambda: _NEG_INF_POINT)
    max_gap_goldstein: ExtremePoint = field(default_factory=lambda: _NEG_INF_POINT)
    hardy_positive_count: int = 0
    goldstein_positive_count: int = 0
    max_joint_cos_variant_deviation: float = 0.0
    max_delta_variant_deviation: float = 0.0

    def merge(self, other: "SliceStats") -> None:
        assert self.theta == other.theta
        self.admissible_points += other.admissible_points
        if other.max_gap_hardy.better_than(self.max_gap_hardy):
            self.max_gap_hardy = other.max_gap_hardy
        if other.max_gap_goldstein.better_than(self.max_gap_goldstein):
            self.max_gap_goldstein = other.max_gap_goldstein
        self.hardy_positive_count += other.hardy_positive_count
        self.goldstein_positive_count += other.goldstein_positive_count
        self.max_joint_cos_variant_deviation = max(
            self.max_joint_cos_variant_deviation, other.max_joint_cos_variant_deviation)
        self.max_delta_variant_deviation = max(
            self.max_delta_variant_deviation, other.max_delta_variant_deviation)

    def to_obj(self, gap_tol: float) -> dict:
        def point_obj(pt: ExtremePoint) -> dict:
            return {"gap": pt.value, "alpha": pt.alpha, "beta": pt.beta}

        return {
            "theta": self.theta,
            "admissible_points": self.admissible_points,
            "max_gap_hardy": point_obj(self.max_gap_hardy),
            "max_gap_goldstein": point_obj(self.max_gap_goldstein),
            "hardy_gap_positive_points": self.hardy_positive_count,
            "goldstein_gap_positive_points": self.goldstein_positive_count,
            "hardy_inequality_ever_satisfied": self.max_gap_hardy.value > gap_tol,
            "goldstein_inequality_ever_satisfied": self.max_gap_goldstein.value > gap_tol,
            "max_joint_cos_variant_deviation": self.max_joint_cos_variant_deviation,
            "max_delta_variant_deviation": self.max_delta_variant_deviation,
        }


@dataclass(frozen=True)
class RetainedPoint:
    theta: float
    alpha: float
    beta: float
    gap_hardy: float
    gap_goldstein: float
    p_contradiction: float
    p_inconclusive_minus: float
    p_inconclusive_ominus: float
    sort_key: tuple

    def to_row(self) -> list:
        return [self.theta, self.alpha, self.beta, self.gap_hardy,
                self.gap_goldstein, self.p_contradiction,
                self.p_inconclusive_minus, self.p_inconclusive_ominus]


RETAINED_CSV_HEADER = [
    "theta", "alpha", "beta", "gap_hardy", "gap_goldstein",
    "p_contradiction", "p_inconclusive_minus", "p_inconclusive_ominus",
]

GAP_TOL = 1e-12


@dataclass
class SweepResult:
    grid: GridSpec
    slices: list  # of SliceStats, ordered like grid.theta_values
    retained: list  # of RetainedPoint, best-first
    top_k: int
    shard: tuple = (0, 1)

    @property
    def max_gap_hardy(self) -> float:
        return max((s.max_gap_hardy.value for s in self.slices), default=-math.inf)

    @property
    def max_gap_goldstein(self) -> float:
        return max((s.max_gap_goldstein.value for s in self.slices), default=-math.inf)

    def to_obj(self) -> dict:
        return {
            "grid": self.grid.to_obj(),
            "shard": {"index": self.shard[0], "count": self.shard[1]},
            "gap_tolerance": GAP_TOL,
            "per_slice": [s.to_obj(GAP_TOL) for s in self.slices],
            "max_gap_hardy": self.max_gap_hardy,
            "max_gap_goldstein": self.max_gap_goldstein,
            "max_joint_cos_variant_deviation": max(
                (s.max_joint_cos_variant_deviation for s in self.slices), default=0.0),
            "max_delta_variant_deviation": max(
                (s.max_delta_variant_deviation for s in self.slices), default=0.0),
            "retained_points": [dict(zip(RETAINED_CSV_HEADER, pt.to_row()))
                                for pt in self.retained],
        }


def _merge_retained(lists: Iterable[list], top_k: int) -> list:
    merged = [pt for lst in lists for pt in lst]
    merged.sort(key=lambda pt: pt.sort_key)
    return merged[:top_k]


def _eval_block(theta: float, theta_index: int, alphas: np.ndarray,
                row_indices: np.ndarray, betas: np.ndarray, margin: float,
                top_k: int) -> tuple[SliceStats, list]:
    """Evaluate a block of alpha rows (possibly strided) for one slice."""
    a_grid, b_grid = np.meshgrid(alphas, betas, indexing="ij")
    mask = admissible_mask(a_grid, b_grid, margin)
    stats = SliceStats(theta=theta)
    n_cols = betas.shape[0]
    if not mask.any():
        return stats, []
    am, bm = a_grid[mask], b_grid[mask]
    q = batch_quantities(theta, am, bm)
    flat = np.nonzero(mask.ravel())[0]
    # Linear index in the *full* grid; used only as a deterministic
    # tie-break so sharded and unsharded runs agree exactly.
    lin_index = np.asarray(row_indices)[flat // n_cols] * n_cols + flat % n_cols
    stats.admissible_points = int(mask.sum())

    for key, attr in (("gap_hardy", "max_gap_hardy"),
                      ("gap_goldstein", "max_gap_goldstein")):
        vals = q[key]
        best = np.lexsort((lin_index, -vals))[0]
        setattr(stats, attr, ExtremePoint(
            float(vals[best]), theta, float(am[best]), float(bm[best]),
            int(lin_index[best])))
    stats.hardy_positive_count = int((q["gap_hardy"] > GAP_TOL).sum())
    stats.goldstein_positive_count = int((q["gap_goldstein"] > GAP_TOL).sum())
    stats.max_joint_cos_variant_deviation = float(q["joint_cos_variant_deviation"].max())
    stats.max_delta_variant_deviation = float(q["delta_variant_deviation"].max())

    # Retain the locally best points; the global merge re-sorts.
    score = np.maximum(q["gap_hardy"], q["gap_goldstein"])
    keep = np.lexsort((lin_index, -score))[:top_k]
    retained = [
        RetainedPoint(
            theta, float(am[i]), float(bm[i]),
            float(q["gap_hardy"][i]), float(q["gap_goldstein"][i]),
            float(q["p_contradiction"][i]),
            float(q["p_inconclusive_minus"][i]),
            float(q["p_inconclusive_ominus"][i]),
            sort_key=(-float(score[i]), theta_index, int(lin_index[i])),
        )
        for i in keep
    ]
    return stats, retained


def _block_args(grid: GridSpec, shard: tuple, rows_per_block: int, top_k: int):
    alphas = grid.alphas()
    betas = grid.betas()
    shard_index, shard_count = shard
    for ti, theta in enumerate(grid.theta_values):
        rows = np.arange(grid.alpha_steps)
        shard_rows = rows[rows % shard_count == shard_index]
        for start in range(0, shard_rows.shape[0], rows_per_block):
            block = shard_rows[start:start + rows_per_block]
            if block.size:
                yield (float(theta), ti, alphas[block], block, betas,
                       grid.margin, top_k)


def sweep(grid: GridSpec, shard: tuple = (0, 1), jobs: int = 1,
          top_k: int = 100, rows_per_block: int = 64) -> SweepResult:
    """Evaluate both gap inequalities over the grid.

    Deterministic and restartable: work is split into contiguous
    alpha-row blocks (interleaved round-robin across shards), each block
    is pure, and the merge is an associative max/sum so any execution
    order gives identical results.
    """
    shard_index, shard_count = shard
    if not (0 <= shard_index < shard_count):
        raise ValueError(f"invalid shard {shard!r}")

    tasks = list(_block_args(grid, shard, rows_per_block, top_k))
    if not tasks:
        raise EmptyGrid("no grid rows assigned to this shard")

    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_eval_block_star, tasks, chunksize=4))
    else:
        results = [_eval_block(*t) for t in tasks]

    slices = {float(th): SliceStats(theta=float(th)) for th in grid.theta_values}
    retained_lists = []
    for (theta, _ti, *_rest), (stats, retained) in zip(tasks, results):
        slices[theta].merge(stats)
        retained_lists.append(retained)

    ordered = [slices[float(th)] for th in grid.theta_values]
    total_admissible = sum(s.admissible_points for s in ordered)
    if total_admissible == 0:
        raise EmptyGrid("every grid point fell inside an exclusion margin")
    return SweepResult(grid=grid, slices=ordered,
                       retained=_merge_retained(retained_lists, top_k),
                       top_k=top_k, shard=shard)


def _eval_block_star(args):
    return _eval_block(*args)


def merge_sweeps(parts: list) -> SweepResult:
    """Combine shard results into the equivalent unsharded result."""
    if not parts:
        raise EmptyGrid("nothing to merge")
    grid = parts[0].grid
    top_k = parts[0].top_k
    slices = {float(th): SliceStats(theta=float(th)) for th in grid.theta_values}
    for part in parts:
        if part.grid != grid:
            raise ValueError("cannot merge sweeps over different grids")
        for s in part.slices:
            slices[s.theta].merge(s)
    ordered = [slices[float(th)] for th in grid.theta_values]
    return SweepResult(grid=grid, slices=ordered,
                       retained=_merge_retained([p.retained for p in parts], top_k),
                       top_k=top_k, shard=(0, 1))
