"""Batch command-line front end.

Every verification is a subcommand emitting a machine-readable report
(JSON by default, CSV on request) plus, when writing to a file,
matplotlib figures rendered alongside it.  Identical configurations
produce byte-identical reports.  Exit codes: 0 when every check passed,
1 when some checked claim failed, 2 for invalid input.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import HardyLabError
from . import figures
from .discrimination import (
    LABEL_MINUS,
    LABEL_PLUS,
    ProjectiveSetting,
    outcome_probs,
    ud_povm,
)
from .geometry import (
    ANGLE_MARGIN,
    ProofAngles,
    build_bases,
    delta_swapped_variant,
    derive_geometry,
    p_joint_ominus_closed,
    validate_angles,
)
from .hardy import (
    A_STAR_CLOSED,
    P_MAX_CLOSED,
    goldstein_ledger,
    hardy_b_basis,
    hardy_ledger,
    hardy_state,
    optimize_hardy,
    verify_rewrite_forms,
)
from .interferometer import TapConfig, distillation_report
from .lhv import correlation_table, lhv_feasible
from .postselect import (
    GAP_TOL,
    GENERALIZED_TOL,
    ROUTE_TOL,
    SWEEP_MARGIN,
    GridSpec,
    RETAINED_CSV_HEADER,
    gaps,
    generalized_ledger,
    p_inconclusive_minus,
    p_inconclusive_ominus,
    sweep,
)
from .qstate import SingleKet, ket_to_obj
from .reportio import dumps_csv, dumps_json, write_text

TOLERANCES = {
    "ledger": 1e-12,
    "generalized_ledger": GENERALIZED_TOL,
    "route_agreement": ROUTE_TOL,
    "gap": GAP_TOL,
    "angle_margin_floor": ANGLE_MARGIN,
    "sweep_margin_default": SWEEP_MARGIN,
}


def _check(cid: str, description: str, passed: bool, **extra) -> dict:
    obj = {"id": cid, "description": description, "pass": bool(passed)}
    obj.update(extra)
    return obj


def _report_skeleton(command: str, config: dict) -> dict:
    return {
        "tool": {"name": "hardylab", "version": __version__},
        "command": command,
        "config": config,
        "tolerances": dict(TOLERANCES),
    }


# --------------------------------------------------------------------------
# Subcommand handlers: each returns (report_dict, csv_payload, figure_fn)
# where csv_payload is (header, rows) and figure_fn(path_stem) renders
# figures next to the report.

def _run_hardy_max(args) -> tuple[dict, tuple, object]:
    a_star, p_max = optimize_hardy()
    report = _report_skeleton("hardy-max", {})
    report["results"] = {
        "a_star": a_star,
        "p_max": p_max,
        "a_star_closed_form": A_STAR_CLOSED,
        "p_max_closed_form": P_MAX_CLOSED,
    }
    report["checks"] = [
        _check("max-value", "numeric maximum matches closed form within 1e-9",
               abs(p_max - P_MAX_CLOSED) <= 1e-9, value=p_max,
               target=P_MAX_CLOSED),
        _check("max-location", "argmax matches closed form within 1e-6",
               abs(a_star - A_STAR_CLOSED) <= 1e-6, value=a_star,
               target=A_STAR_CLOSED),
    ]
    csv_payload = (["key", "value"],
                   [["a_star", a_star], ["p_max", p_max],
                    ["a_star_closed_form", A_STAR_CLOSED],
                    ["p_max_closed_form", P_MAX_CLOSED]])

    def figs(stem: Path):
        figures.render_hardy_max(a_star, p_max, stem.with_name(stem.name + "_curve.png"))

    return report, csv_payload, figs


def _ledger_rows(ledgers: list) -> tuple:
    header = ["ledger", "id", "description", "value", "target", "pass"]
    rows = []
    for led in ledgers:
        for e in led["entries"]:
            rows.append([led["name"], e["id"], e["description"], e["value"],
                         e["target"], e["pass"]])
    return header, rows


def _run_ledger(args) -> tuple[dict, tuple, object]:
    theta = args.theta
    ledgers = [hardy_ledger(theta), goldstein_ledger(theta),
               verify_rewrite_forms(theta)]
    report = _report_skeleton("ledger", {"theta": theta})
    report["results"] = {"ledgers": [led.to_obj() for led in ledgers]}
    report["checks"] = [
        _check(f"{led.name}", f"every claim of ledger '{led.name}' holds",
               led.all_pass) for led in ledgers
    ]
    csv_payload = _ledger_rows(report["results"]["ledgers"])

    def figs(stem: Path):
        figures.render_ledger(report["results"]["ledgers"][:2],
                              stem.with_name(stem.name + "_ledger.png"))

    return report, csv_payload, figs


def _run_generalized(args) -> tuple[dict, tuple, object]:
    validate_angles(args.theta, args.alpha, args.beta, margin=args.margin)
    p = ProofAngles(args.theta, args.alpha, args.beta)
    g = derive_geometry(p)
    bases = build_bases(p, g)
    led_h = generalized_ledger(p, "hardy")
    led_g = generalized_ledger(p, "goldstein")
    inc_minus = p_inconclusive_minus(p)
    inc_ominus = p_inconclusive_ominus(p)
    gap_h, gap_g = gaps(p)
    forms = p_joint_ominus_closed(p)
    delta_alt = delta_swapped_variant(p, g)

    report = _report_skeleton("generalized", {
        "theta": args.theta, "alpha": args.alpha, "beta": args.beta,
        "margin": args.margin,
    })
    report["results"] = {
        "derived_geometry": g.to_obj(),
        "measurement_directions": {
            "hat_plus_1": ket_to_obj(bases.hat_plus_1),
            "hat_minus_1": ket_to_obj(bases.hat_minus_1),
            "hat_plus_2": ket_to_obj(bases.hat_plus_2),
            "hat_minus_2": ket_to_obj(bases.hat_minus_2),
            "circled_plus_1": ket_to_obj(bases.oplus_1),
            "circled_minus_1": ket_to_obj(bases.ominus_1),
            "circled_plus_2": ket_to_obj(bases.oplus_2),
            "circled_minus_2": ket_to_obj(bases.ominus_2),
        },
        "ledgers": [led_h.to_obj(), led_g.to_obj()],
        "p_inconclusive_minus": {"via_trace": inc_minus.via_trace,
                                 "via_decomposition": inc_minus.via_decomposition},
        "p_inconclusive_ominus": {"via_trace": inc_ominus.via_trace,
                                  "via_decomposition": inc_ominus.via_decomposition},
        "gap_hardy": gap_h.to_obj(),
        "gap_goldstein": gap_g.to_obj(),
        "closed_forms": {
            "p_contradiction": forms.main,
            "consistent_alternate": forms.consistent_alt,
            "cos_variant": forms.cos_variant,
            "cos_variant_deviation": abs(forms.cos_variant - forms.main),
            "delta": g.delta,
            "delta_swapped_variant": delta_alt,
        },
    }
    report["checks"] = [
        _check("hardy-claims", "first three generalized claims hold",
               all(e.passed for e in led_h.entries[:3])),
        _check("goldstein-claims", "first three rearranged claims hold",
               all(e.passed for e in led_g.entries[:3])),
        _check("routes-minus", "two routes agree for P(inconclusive, hat-minus)",
               abs(inc_minus.via_trace - inc_minus.via_decomposition) <= ROUTE_TOL),
        _check("routes-ominus", "two routes agree for P(inconclusive, circled-minus)",
               abs(inc_ominus.via_trace - inc_ominus.via_decomposition) <= ROUTE_TOL),
        _check("closed-form", "closed form matches direct computation",
               abs(forms.main - gap_h.p_contradiction) <= ROUTE_TOL),
    ]
    header = ["key", "value"]
    rows = [["gap_hardy", gap_h.gap], ["gap_goldstein", gap_g.gap],
            ["p_contradiction", gap_h.p_contradiction],
            ["p_inconclusive_minus", inc_minus.via_trace],
            ["p_inconclusive_ominus", inc_ominus.via_trace]]

    def figs(stem: Path):
        figures.render_ledger(report["results"]["ledgers"],
                              stem.with_name(stem.name + "_ledger.png"))

    return report, (header, rows), figs


def _run_sweep(args) -> tuple[dict, tuple, object]:
    thetas = tuple(args.theta_list)
    grid = GridSpec(theta_values=thetas, alpha_steps=args.steps,
                    beta_steps=args.beta_steps or args.steps,
                    margin=args.margin)
    shard = _parse_shard(args.shard) if isinstance(args.shard, str) else args.shard
    top_k = args.top
    if args.dump_all:
        top_k = len(thetas) * args.steps * (args.beta_steps or args.steps)
    result = sweep(grid, shard=shard, jobs=args.jobs, top_k=top_k,
                   rows_per_block=args.rows_per_block)
    report = _report_skeleton("sweep", {
        "theta_list": list(thetas), "steps": args.steps,
        "beta_steps": args.beta_steps or args.steps,
        "margin": args.margin, "shard": list(shard), "jobs": args.jobs,
        "top": args.top,
    })
    report["results"] = result.to_obj()
    maximal = [s for s in result.slices
               if abs(s.theta - math.pi / 2) <= 1e-12]
    checks = []
    for s in maximal:
        checks.append(_check(
            f"no-go-theta-{s.theta:.6f}",
            "maximally entangled slice: neither gap inequality is satisfied",
            s.max_gap_hardy.value <= GAP_TOL and s.max_gap_goldstein.value <= GAP_TOL,
            max_gap_hardy=s.max_gap_hardy.value,
            max_gap_goldstein=s.max_gap_goldstein.value,
        ))
    report["checks"] = checks
    report["notes"] = [
        "slices with theta < pi/2 are reported as data; positive gaps there "
        "are not checked against any external claim",
    ]
    rows = [pt.to_row() for pt in result.retained]
    csv_payload = (RETAINED_CSV_HEADER, rows)

    def figs(stem: Path):
        figures.render_sweep(grid, stem.with_name(stem.name + "_gapmap.png"))

    return report, csv_payload, figs


def _run_wxhh(args) -> tuple[dict, tuple, object]:
    tap = TapConfig(args.tau1, args.tau2)
    rep = distillation_report(tap)
    report = _report_skeleton("wxhh", {"tau1": args.tau1, "tau2": args.tau2})
    report["results"] = rep
    checks = [
        _check("keep-probability", "kept fraction equals (1+Q^2)/2",
               abs(rep["keep_probability"] - (1 + rep["Q"] ** 2) / 2)
               <= 1e-12),
    ]
    if rep.get("ledger"):
        checks.append(_check("ledger", "four detector claims hold",
                             rep["ledger"]["all_pass"]))
        checks.append(_check(
            "below-max-entropy",
            "kept state is not maximally entangled",
            rep["entropy"] < math.log(2.0) - 1e-6,
            entropy=rep["entropy"]))
        checks.append(_check(
            "selection-order",
            "selection before and after measurements agree",
            rep["selection_order_max_deviation"] <= 1e-12,
            max_deviation=rep["selection_order_max_deviation"]))
    report["checks"] = checks
    header = ["key", "value"]
    rows = [[k, rep[k]] for k in ("tau1", "tau2", "Q",
                                  "keep_probability", "entropy")]

    def figs(stem: Path):
        figures.render_distillation(rep, stem.with_name(stem.name + "_distill.png"))

    return report, (header, rows), figs


def _run_lhv(args) -> tuple[dict, tuple, object]:
    theta = args.theta
    psi = hardy_state(theta)
    plus_b, minus_b = hardy_b_basis(theta)
    comp = ((LABEL_PLUS, SingleKet(1.0, 0.0)), (LABEL_MINUS, SingleKet(0.0, 1.0)))
    bmeas = ((LABEL_PLUS, plus_b.normalized()), (LABEL_MINUS, minus_b.normalized()))
    party1 = (ProjectiveSetting("A1", comp), ProjectiveSetting("B1", bmeas))
    party2 = (ProjectiveSetting("A2", comp), ProjectiveSetting("B2", bmeas))
    table = correlation_table(psi, party1, party2)
    verdict = lhv_feasible(table)

    report = _report_skeleton("lhv", {"theta": theta})
    report["results"] = {
        "table": table.to_obj(),
        "verdict": verdict.to_obj(),
    }
    if verdict.feasible:
        checks = [_check("witness", "weights reproduce the table within 1e-8",
                         verdict.residual is not None and verdict.residual <= 1e-8,
                         residual=verdict.residual)]
    else:
        checks = [_check("witness", "separating certificate has a positive margin",
                         verdict.certificate["margin"] > 1e-10,
                         margin=verdict.certificate["margin"])]
    report["checks"] = checks
    header = ["key", "value"]
    rows = [["feasible", verdict.feasible],
            ["exact_arithmetic", verdict.exact_arithmetic]]
    if verdict.feasible:
        rows.append(["residual", verdict.residual])
    else:
        rows.append(["margin", verdict.certificate["margin"]])
    return report, (header, rows), None


def _run_povm(args) -> tuple[dict, tuple, object]:
    validate_angles(math.pi / 4, args.alpha, args.beta, margin=args.margin)
    hat_plus = SingleKet.rotation(args.alpha)
    hat_minus = SingleKet(-math.sin(args.beta), math.cos(args.beta))
    povm = ud_povm(hat_plus, hat_minus)
    s_ov = abs(math.sin(args.alpha - args.beta))
    total = sum(op.mat for _, op in povm.elements)
    completeness = float(np.abs(total - np.eye(2)).max())
    min_eig = min(op.min_eigenvalue() for _, op in povm.elements)
    on_plus = outcome_probs(hat_plus, povm)
    on_minus = outcome_probs(hat_minus, povm)

    report = _report_skeleton("povm", {
        "alpha": args.alpha, "beta": args.beta, "margin": args.margin,
    })
    report["results"] = {
        "overlap": s_ov,
        "elements": povm.to_obj(),
        "completeness_residual": completeness,
        "min_eigenvalue": min_eig,
        "on_plus_input": on_plus,
        "on_minus_input": on_minus,
    }
    report["checks"] = [
        _check("completeness", "elements sum to the identity",
               completeness <= 1e-12, residual=completeness),
        _check("positivity", "every element is positive semidefinite",
               min_eig >= -1e-12, min_eigenvalue=min_eig),
        _check("unambiguous", "no misidentification on either input",
               on_plus["minus"] <= 1e-12 and on_minus["plus"] <= 1e-12),
        _check("success", "success probability equals 1 - overlap",
               abs(on_plus["plus"] - (1 - s_ov)) <= 1e-12
               and abs(on_minus["minus"] - (1 - s_ov)) <= 1e-12),
    ]
    header = ["key", "value"]
    rows = [["overlap", s_ov], ["completeness_residual", completeness],
            ["min_eigenvalue", min_eig],
            ["success_on_plus", on_plus["plus"]],
            ["inconclusive_on_plus", on_plus["inconclusive"]]]

    def figs(stem: Path):
        figures.render_povm(args.alpha, args.beta,
                            stem.with_name(stem.name + "_povm.png"))

    return report, (header, rows), figs


# --------------------------------------------------------------------------

def _parse_shard(text: str) -> tuple:
    try:
        k, n = text.split("/")
        shard = (int(k), int(n))
    except ValueError:
        raise ValueError(f"shard must look like k/n, got {text!r}")
    if not (0 <= shard[0] < shard[1]):
        raise ValueError(f"shard index out of range: {text!r}")
    return shard


def _float_list(text: str) -> list:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated floats: {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hardylab",
        description="Verification suite for Hardy-type nonlocality "
                    "constructions on two-qubit states (angles in radians).",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", type=Path, default=None,
                       help="write the report here (default: stdout)")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--no-figures", action="store_true",
                       help="skip figure rendering next to --out")

    p = sub.add_parser("hardy-max", help="maximize the contradiction probability")
    common(p)
    p.set_defaults(handler=_run_hardy_max)

    p = sub.add_parser("ledger", help="two-outcome ladder ledgers for one theta")
    p.add_argument("--theta", type=float, required=True)
    common(p)
    p.set_defaults(handler=_run_ledger)

    p = sub.add_parser("generalized",
                       help="post-selected ledgers, gaps, and closed-form "
                            "deviation report")
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--margin", type=float, default=ANGLE_MARGIN,
                   help="admissibility margin for the singular sets")
    common(p)
    p.set_defaults(handler=_run_generalized)

    p = sub.add_parser("sweep", help="gap inequalities over an (alpha, beta) grid")
    p.add_argument("--theta-list", type=_float_list, required=True,
                   help="comma-separated theta slice values")
    p.add_argument("--steps", type=int, required=True,
                   help="alpha grid steps (and beta steps unless overridden)")
    p.add_argument("--beta-steps", type=int, default=None)
    p.add_argument("--margin", type=float, default=SWEEP_MARGIN)
    p.add_argument("--shard", type=str, default="0/1",
                   help="evaluate shard k/n of the grid")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--top", type=int, default=100,
                   help="retained points with the largest gaps")
    p.add_argument("--dump-all", action="store_true",
                   help="retain every admissible point (memory-heavy on "
                        "large grids)")
    p.add_argument("--rows-per-block", type=int, default=64)
    common(p)
    p.set_defaults(handler=_run_sweep)

    p = sub.add_parser("wxhh",
                       help="tapped-interferometer distillation analysis")
    p.add_argument("--tau1", type=float, required=True)
    p.add_argument("--tau2", type=float, required=True)
    common(p)
    p.set_defaults(handler=_run_wxhh)

    p = sub.add_parser("lhv", help="local-model feasibility for one theta")
    p.add_argument("--theta", type=float, required=True)
    common(p)
    p.set_defaults(handler=_run_lhv)

    p = sub.add_parser("povm", help="discrimination-measurement validity suite")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--margin", type=float, default=ANGLE_MARGIN)
    common(p)
    p.set_defaults(handler=_run_povm)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report, csv_payload, figure_fn = args.handler(args)
    except (HardyLabError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    all_pass = all(c["pass"] for c in report.get("checks", []))
    report["all_pass"] = all_pass

    if args.format == "json":
        text = dumps_json(report)
    else:
        header, rows = csv_payload
        text = dumps_csv(header, rows)

    if args.out is not None:
        write_text(args.out, text)
        if figure_fn is not None and not args.no_figures:
            stem = args.out.with_suffix("")
            figure_fn(stem)
    else:
        sys.stdout.write(text)

    return 0 if all_pass else 1


if __name__ == "__main__":
    sys.exit(main())
