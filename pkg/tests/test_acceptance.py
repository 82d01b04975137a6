"""Acceptance suite: the ten exit criteria, one test each, every
tolerance pinned.  Each test prints one pass/fail line (run with -s to
see them on success)."""

import math
import time

import numpy as np

from hardylab.discrimination import (
    LABEL_INCONCLUSIVE,
    LABEL_MINUS,
    LABEL_PLUS,
    ProjectiveSetting,
    outcome_probs,
    ud_povm,
)
from hardylab.geometry import ProofAngles, p_joint_ominus_closed
from hardylab.hardy import (
    A_STAR_CLOSED,
    P_MAX_CLOSED,
    goldstein_ledger,
    hardy_b_basis,
    hardy_ledger,
    hardy_state,
    optimize_hardy,
    p_hardy,
)
from hardylab.interferometer import (
    TapConfig,
    _distillation_settings,
    hardy_angle_for_ratio,
    selection_order_agreement,
    tap_postselect,
    wxhh_ledger,
)
from hardylab.lhv import correlation_table, lhv_feasible
from hardylab.postselect import (
    GridSpec,
    batch_quantities,
    cross_validate_routes,
    gaps,
    p_inconclusive_minus,
    p_inconclusive_ominus,
    sweep,
)
from hardylab.qstate import SingleKet, partial_trace_second, von_neumann_entropy
from hardylab.reportio import dumps_json

PI_2 = math.pi / 2


def _report(num: int, name: str, ok: bool, detail: str = "") -> None:
    print(f"ACCEPTANCE {num:02d} {name}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, f"criterion {num} ({name}): {detail}"


def test_criterion_01_hardy_maximum():
    t0 = time.monotonic()
    a_star, p_max = optimize_hardy()
    elapsed = time.monotonic() - t0
    ok = (abs(p_max - P_MAX_CLOSED) <= 1e-9
          and abs(a_star - A_STAR_CLOSED) <= 1e-6
          and round(p_max, 4) == 0.0902
          and elapsed < 1.0)
    _report(1, "contradiction-probability maximum", ok,
            f"p_max={p_max:.12f} a*={a_star:.8f} ({elapsed:.3f}s)")


def test_criterion_02_ladder_ledgers_grid():
    t0 = time.monotonic()
    worst_closed = 0.0
    all_pass = True
    for theta in np.linspace(0.01, PI_2 - 0.01, 1000):
        led = hardy_ledger(theta)
        gled = goldstein_ledger(theta)
        all_pass &= led.all_pass and gled.all_pass
        worst_closed = max(worst_closed,
                           abs(led.entry("H4").value - p_hardy(math.cos(theta))))
    elapsed = time.monotonic() - t0
    ok = all_pass and worst_closed <= 1e-12 and elapsed < 2.0
    _report(2, "two-outcome ledgers on 1000-point grid", ok,
            f"max closed-form deviation={worst_closed:.2e} ({elapsed:.3f}s)")


def test_criterion_03_orthogonal_limit_recovery():
    details = []
    ok = True
    for theta in (0.5, 1.0, 1.4):
        p = ProofAngles(theta, 1e-6, 0.0)
        dev = abs(p_joint_ominus_closed(p).main - p_hardy(math.cos(theta)))
        inc_m = p_inconclusive_minus(p).via_trace
        inc_o = p_inconclusive_ominus(p).via_trace
        ok &= dev < 1e-5 and inc_m < 1e-5 and inc_o < 1e-5
        details.append(f"theta={theta}: dev={dev:.2e} inc=({inc_m:.2e},{inc_o:.2e})")
    _report(3, "vanishing-overlap limit recovers the plain argument", ok,
            "; ".join(details))


def test_criterion_04_route_cross_validation():
    t0 = time.monotonic()
    rng = np.random.default_rng(2024)
    n = 100_000
    theta = rng.uniform(0.05, PI_2, n)
    alpha = rng.uniform(0.05, math.pi - 0.05, n)
    # Keep 1e-2 rad clear of the overlap singularity, where the secant
    # factor makes absolute 1e-12 comparisons ill-conditioned.
    mag = rng.uniform(0.01, PI_2 - 0.01, n)
    beta = alpha - np.where(rng.uniform(size=n) < 0.5, mag, -mag)
    dev = cross_validate_routes(theta, alpha, beta)
    elapsed = time.monotonic() - t0
    ok = (dev["max_dev_contradiction"] <= 1e-12
          and dev["max_dev_inconclusive_minus"] <= 1e-12
          and dev["max_dev_inconclusive_ominus"] <= 1e-12
          and elapsed < 30.0)
    _report(4, "route agreement on 1e5 random samples", ok,
            f"devs=({dev['max_dev_contradiction']:.2e}, "
            f"{dev['max_dev_inconclusive_minus']:.2e}, "
            f"{dev['max_dev_inconclusive_ominus']:.2e}) ({elapsed:.3f}s)")


def test_criterion_05_maximally_entangled_no_go():
    t0 = time.monotonic()
    grid = GridSpec(theta_values=(PI_2,), alpha_steps=1024, beta_steps=1024,
                    margin=1e-6)
    res = sweep(grid)
    s = res.slices[0]

    rng = np.random.default_rng(777)
    n = 1_000_000
    alpha = rng.uniform(1e-6, math.pi - 1e-6, n)
    mag = rng.uniform(1e-6, PI_2 - 1e-6, n)
    beta = alpha - np.where(rng.uniform(size=n) < 0.5, mag, -mag)
    q = batch_quantities(PI_2, alpha, beta)
    rand_max_h = float(q["gap_hardy"].max())
    rand_max_g = float(q["gap_goldstein"].max())

    # independent closed-form check on the same samples
    s2 = np.sin(alpha - beta) ** 2
    closed_ok = bool((s2 <= np.abs(np.sin(alpha - beta)) + 1e-15).all())
    elapsed = time.monotonic() - t0

    ok = (s.admissible_points >= 1_000_000
          and s.max_gap_hardy.value <= 1e-12
          and s.max_gap_goldstein.value <= 1e-12
          and rand_max_h <= 1e-12 and rand_max_g <= 1e-12
          and closed_ok and elapsed < 60.0)
    _report(5, "maximal-entanglement no-go on 2e6+ points", ok,
            f"grid points={s.admissible_points} "
            f"max gaps=({s.max_gap_hardy.value:.2e}, {rand_max_h:.2e}) "
            f"({elapsed:.3f}s)")


def test_criterion_06_spot_values():
    p = ProofAngles(PI_2, math.pi / 3, math.pi / 6)
    gap_h, gap_g = gaps(p)
    inc_m = p_inconclusive_minus(p)
    inc_o = p_inconclusive_ominus(p)
    values = {
        "P(contradiction)": (gap_h.p_contradiction, 0.125),
        "P(?, circled-minus)": (inc_o.via_trace, 0.25),
        "P(?, hat-minus)": (inc_m.via_trace, 0.25),
        "gap_hardy": (gap_h.gap, -0.125),
        "gap_goldstein": (gap_g.gap, -0.125),
    }
    ok = all(abs(got - want) <= 1e-12 for got, want in values.values())
    _report(6, "closed-form spot values", ok,
            " ".join(f"{k}={got:.6f}" for k, (got, want) in values.items()))


def test_criterion_07_discrimination_suite():
    t0 = time.monotonic()
    rng = np.random.default_rng(4096)
    worst = {"completeness": 0.0, "eig": 0.0, "misid": 0.0, "success": 0.0}
    for _ in range(10_000):
        alpha = rng.uniform(1e-3, math.pi - 1e-3)
        beta = alpha - rng.uniform(-PI_2 + 1e-3, PI_2 - 1e-3)
        hat_plus = SingleKet.rotation(alpha)
        hat_minus = SingleKet(-math.sin(beta), math.cos(beta))
        povm = ud_povm(hat_plus, hat_minus)
        s_ov = abs(math.sin(alpha - beta))
        total = sum(op.mat for _, op in povm.elements)
        worst["completeness"] = max(worst["completeness"],
                                    float(np.abs(total - np.eye(2)).max()))
        worst["eig"] = max(worst["eig"],
                           max(-op.min_eigenvalue() for _, op in povm.elements))
        on_plus = outcome_probs(hat_plus, povm)
        on_minus = outcome_probs(hat_minus, povm)
        worst["misid"] = max(worst["misid"], on_plus[LABEL_MINUS],
                             on_minus[LABEL_PLUS])
        worst["success"] = max(worst["success"],
                               abs(on_plus[LABEL_PLUS] - (1 - s_ov)),
                               abs(on_minus[LABEL_MINUS] - (1 - s_ov)))
    elapsed = time.monotonic() - t0
    ok = (worst["completeness"] <= 1e-12 and worst["eig"] <= 1e-12
          and worst["misid"] <= 1e-12 and worst["success"] <= 1e-12)
    _report(7, "discrimination validity on 1e4 random pairs", ok,
            f"worst={worst} ({elapsed:.3f}s)")


def test_criterion_08_distillation():
    ok = True
    details = []
    for q in (0.3, 0.5, 0.8):
        tap = TapConfig(1.0, q)
        res = tap_postselect(tap)
        keep_dev = abs(res.keep_probability - (1 + q * q) / 2)
        entropy = von_neumann_entropy(partial_trace_second(res.effective))
        led = wxhh_ledger(q)
        w123 = all(
            abs(led.entry(c).value - t) <= 1e-10
            for c, t in (("W1", 1.0), ("W2", 1.0), ("W3", 0.0)))
        a_eff = math.cos(hardy_angle_for_ratio(q))
        w4_dev = abs(led.entry("W4").value - p_hardy(a_eff))
        _, _, st = _distillation_settings(q)
        sel_dev = max(selection_order_agreement(tap, sa, sb)
                      for sa in (st.a1, st.b1) for sb in (st.a2, st.b2))
        ok &= (keep_dev <= 1e-12 and entropy < math.log(2) - 1e-6
               and w123 and w4_dev <= 1e-10 and sel_dev <= 1e-12)
        details.append(f"Q={q}: W4dev={w4_dev:.1e} seldev={sel_dev:.1e}")
    _report(8, "interferometric distillation claims", ok, "; ".join(details))


def test_criterion_09_lhv_oracle():
    comp = ((LABEL_PLUS, SingleKet(1.0, 0.0)), (LABEL_MINUS, SingleKet(0.0, 1.0)))

    def plain_table(theta):
        plus_b, minus_b = hardy_b_basis(theta)
        bmeas = ((LABEL_PLUS, plus_b), (LABEL_MINUS, minus_b))
        party1 = (ProjectiveSetting("A1", comp), ProjectiveSetting("B1", bmeas))
        party2 = (ProjectiveSetting("A2", comp), ProjectiveSetting("B2", bmeas))
        return correlation_table(hardy_state(theta), party1, party2)

    results = []
    ok = True
    for theta, want_feasible, label in (
            (0.0, True, "product"),
            (math.acos(A_STAR_CLOSED), False, "optimal angle"),
            (PI_2, True, "maximal/degenerate settings")):
        t0 = time.monotonic()
        verdict = lhv_feasible(plain_table(theta))
        elapsed = time.monotonic() - t0
        good = verdict.feasible == want_feasible and elapsed < 1.0
        if verdict.feasible:
            good &= verdict.residual <= 1e-8
        else:
            good &= verdict.certificate["margin"] > 1e-10
        ok &= good
        results.append(f"{label}: feasible={verdict.feasible} ({elapsed:.3f}s)")
    _report(9, "local-model oracle verdicts", ok, "; ".join(results))


def test_criterion_10_deviation_report_determinism():
    grid = GridSpec(theta_values=(0.3, 0.6, 0.9, 1.2, PI_2),
                    alpha_steps=120, beta_steps=120, margin=1e-6)
    text1 = dumps_json(sweep(grid).to_obj())
    text2 = dumps_json(sweep(grid).to_obj())
    res = sweep(grid)
    joint_dev = max(s.max_joint_cos_variant_deviation for s in res.slices)
    delta_dev = max(s.max_delta_variant_deviation for s in res.slices)
    # slices below the maximal angle report positive gaps as data only
    small = [s for s in res.slices if s.theta < PI_2 - 1e-9]
    reported = all(s.max_gap_hardy.value > 0 for s in small)
    maximal = [s for s in res.slices if abs(s.theta - PI_2) <= 1e-9]
    asserted = all(s.max_gap_hardy.value <= 1e-12 for s in maximal)
    ok = (text1 == text2 and joint_dev > 0 and delta_dev > 0
          and reported and asserted)
    _report(10, "deviation statistics, deterministic report", ok,
            f"joint_dev={joint_dev:.4f} delta_dev={delta_dev:.4f} "
            f"byte_identical={text1 == text2}")
