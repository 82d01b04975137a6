"""Two-particle interferometer with tap beam splitters: post-selected
distillation of a partially entangled state from a maximally entangled
source.

Each particle is modeled as a two-path qubit.  The source emits

    (|first first> + |second second>) / sqrt(2)

(paths of particle 1 and 2 respectively).  A tap splitter with amplitude
transmittance tau_i sits on each particle's second path and diverts the
reflected amplitude to a monitor detector.  Conditioning every run on
neither monitor firing leaves the pair in

    (|first first> + Q |second second>) / sqrt(1 + Q^2),   Q = tau1*tau2,

which for Q < 1 is entangled but no longer maximally entangled.  The
kept fraction of runs is (1 + Q^2)/2.

A measurement setting on one particle is a phase shifter on the second
path followed by a beam splitter with real transmitted amplitude t and
reflected amplitude i*sqrt(1-t^2); the first output port projects onto

    t |first> + i sqrt(1-t^2) e^{i phase} |second>.

Any single-particle direction is realizable this way up to a global
phase, so the four outcome claims of the ladder argument can be staged
on the distilled state by pulling the required directions back through
the local equivalence between the distilled state and the Hardy-family
state of equal partial entropy.

Whether the no-monitor selection is applied before or after the local
measurements does not change any conditioned statistic; both orderings
are implemented (``three_mode_statistics`` keeps the monitor modes
explicit) and their agreement is a tested invariant.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DomainError, SpectraMismatch
from .hardy import hardy_b_basis, hardy_state, p_hardy
from .ledger import TARGET_POSITIVE, Ledger, make_entry
from .qstate import (
    BipartiteKet,
    Operator2,
    SingleKet,
    joint_prob,
    partial_trace_second,
    schmidt_coefficients,
    von_neumann_entropy,
)

WXHH_TOL = 1e-10


@dataclass(frozen=True)
class TapConfig:
    """Amplitude transmittances of the two tap splitters."""

    tau1: float
    tau2: float

    def __post_init__(self):
        for name, t in (("tau1", self.tau1), ("tau2", self.tau2)):
            if not (0.0 <= t <= 1.0):
                raise DomainError(f"{name}={t!r} outside [0, 1]")


@dataclass(frozen=True)
class Setting:
    """Phase shifter plus final beam splitter on one particle."""

    phase: float
    transmittance: float

    def __post_init__(self):
        if not (0.0 <= self.transmittance <= 1.0):
            raise DomainError(f"transmittance={self.transmittance!r} outside [0, 1]")

    @property
    def reflectance(self) -> float:
        return math.sqrt(max(0.0, 1.0 - self.transmittance ** 2))


def hsz_state() -> BipartiteKet:
    """The maximally entangled two-path source state."""
    s = 1.0 / math.sqrt(2.0)
    return BipartiteKet((s, 0.0, 0.0, s))


class TapResult(NamedTuple):
    effective: BipartiteKet
    amplitude_ratio: float   # Q = tau1 * tau2
    keep_probability: float  # (1 + Q^2)/2


def tap_postselect(t: TapConfig) -> TapResult:
    """State and statistics after conditioning on no monitor click.

    At Q = 0 the kept branch is the product state |first first>; the
    function still returns it (with keep probability 1/2) rather than
    failing, since the branch never vanishes entirely.
    """
    q = t.tau1 * t.tau2
    keep = (1.0 + q * q) / 2.0
    norm = math.sqrt(1.0 + q * q)
    effective = BipartiteKet((1.0 / norm, 0.0, 0.0, q / norm))
    return TapResult(effective, q, keep)


def setting_projectors(s: Setting) -> tuple[SingleKet, SingleKet]:
    """Directions of the two output ports (first port, second port)."""
    t, r = s.transmittance, s.reflectance
    first = SingleKet(t, 1j * r * cmath.exp(1j * s.phase))
    return first, first.orthocomplement()


def setting_for_direction(direction: SingleKet) -> Setting:
    """Solve (phase, transmittance) so the first output port projects
    onto the given direction (up to a global phase)."""
    v = direction.normalized().vec
    if abs(v[0]) > 1e-14:
        v = v * cmath.exp(-1j * cmath.phase(v[0]))
    t = float(min(1.0, max(0.0, v[0].real)))
    r = math.sqrt(max(0.0, 1.0 - t * t))
    if r < 1e-14:
        phase = 0.0
    else:
        phase = (cmath.phase(v[1]) - math.pi / 2.0) % (2.0 * math.pi)
    return Setting(phase=phase, transmittance=t)


def local_equivalence(psi_a: BipartiteKet, psi_b: BipartiteKet,
                      tol: float = 1e-10) -> tuple[Operator2, Operator2]:
    """Local unitaries (u1, u2) with (u1 (x) u2)|psi_a> = |psi_b> up to
    a global phase, via the singular value decomposition of both
    amplitude matrices.  Requires equal Schmidt spectra."""
    sa = schmidt_coefficients(psi_a)
    sb = schmidt_coefficients(psi_b)
    if np.abs(sa - sb).max() > tol:
        raise SpectraMismatch(f"Schmidt spectra differ: {sa} vs {sb}")
    ua, _, vha = np.linalg.svd(psi_a.mat)
    ub, _, vhb = np.linalg.svd(psi_b.mat)
    u1 = ub @ ua.conj().T
    u2 = vhb.T @ vha.conj()
    return Operator2.from_mat(u1), Operator2.from_mat(u2)


def hardy_angle_for_ratio(q: float) -> float:
    """The Hardy-family angle whose state has the same Schmidt spectrum
    as (|first first> + q |second second>)/sqrt(1+q^2)."""
    if not (0.0 <= q <= 1.0):
        raise DomainError(f"amplitude ratio {q!r} outside [0, 1]")
    return math.asin(math.sqrt(2.0 * q / (1.0 + q * q)))


def ratio_for_hardy_angle(theta: float) -> float:
    """Inverse of ``hardy_angle_for_ratio`` on (0, pi/2]."""
    b2 = (math.sin(theta) ** 2) / 2.0
    if b2 <= 0.0:
        return 0.0
    disc = math.sqrt(max(0.0, 1.0 / b2 ** 2 - 4.0))
    return (1.0 / b2 - disc) / 2.0


class _PulledBackSettings(NamedTuple):
    a1: Setting
    b1: Setting
    a2: Setting
    b2: Setting


def _distillation_settings(q: float) -> tuple[BipartiteKet, float, _PulledBackSettings]:
    """Effective state, matched Hardy angle, and the four interferometer
    settings realizing the ladder measurements on it.

    Port convention: the first output of particle 1's final splitter is
    detector F, of particle 2's is detector H.  The F/H directions carry
    the outcomes that enter the four claims.
    """
    norm = math.sqrt(1.0 + q * q)
    effective = BipartiteKet((1.0 / norm, 0.0, 0.0, q / norm))
    theta = hardy_angle_for_ratio(q)
    target = hardy_state(theta)
    u1, u2 = local_equivalence(effective, target)
    minus = SingleKet(0.0, 1.0)
    _, minus_b = hardy_b_basis(theta)

    def pull_back(u: Operator2, ket: SingleKet) -> SingleKet:
        return SingleKet.from_vec(u.mat.conj().T @ ket.vec)

    settings = _PulledBackSettings(
        a1=setting_for_direction(pull_back(u1, minus)),
        b1=setting_for_direction(pull_back(u1, minus_b)),
        a2=setting_for_direction(pull_back(u2, minus)),
        b2=setting_for_direction(pull_back(u2, minus_b)),
    )
    return effective, theta, settings


def wxhh_ledger(q: float) -> Ledger:
    """The four detector claims on the distilled state:

    P(H in A2 | F in B1) = 1, P(F in A1 | H in B2) = 1,
    P(F in A1, H in A2) = 0,  P(F in B1, H in B2) > 0.
    """
    if not (0.0 < q < 1.0):
        raise DomainError(f"amplitude ratio {q!r} outside (0, 1)")
    effective, theta, st = _distillation_settings(q)

    f_a1, _ = setting_projectors(st.a1)
    f_b1, _ = setting_projectors(st.b1)
    h_a2, g_a2 = setting_projectors(st.a2)
    h_b2, g_b2 = setting_projectors(st.b2)

    def conditional(first_given: SingleKet, outcome2: SingleKet,
                    other2: SingleKet) -> float | None:
        marg = joint_prob(effective, first_given, outcome2) \
            + joint_prob(effective, first_given, other2)
        if marg <= 1e-15:
            return None
        return joint_prob(effective, first_given, outcome2) / marg

    def conditional_first(outcome1: SingleKet, second_given: SingleKet) -> float | None:
        other1 = outcome1.orthocomplement()
        marg = joint_prob(effective, outcome1, second_given) \
            + joint_prob(effective, other1, second_given)
        if marg <= 1e-15:
            return None
        return joint_prob(effective, outcome1, second_given) / marg

    w1 = conditional(f_b1, h_a2, g_a2)
    w2 = conditional_first(f_a1, h_b2)
    w3 = joint_prob(effective, f_a1, h_a2)
    w4 = joint_prob(effective, f_b1, h_b2)

    entries = (
        make_entry("W1", "P(A2=H | B1=F)", w1, 1.0, WXHH_TOL),
        make_entry("W2", "P(A1=F | B2=H)", w2, 1.0, WXHH_TOL),
        make_entry("W3", "P(A1=F, A2=H)", w3, 0.0, WXHH_TOL),
        make_entry("W4", "P(B1=F, B2=H)", w4, TARGET_POSITIVE, WXHH_TOL),
    )
    expected_w4 = p_hardy(math.cos(theta))
    notes = (f"matched ladder angle {theta:.12g}; "
             f"closed-form contradiction probability {expected_w4:.12g}",)
    return Ledger("distillation", entries, applicable=entries[3].passed, notes=notes)


# ---------------------------------------------------------------------------
# Selection before vs. after the measurements.

def effective_statistics(t: TapConfig, s1: Setting, s2: Setting) -> dict:
    """Joint port statistics measured on the renormalized kept state."""
    eff = tap_postselect(t).effective
    p1 = setting_projectors(s1)
    p2 = setting_projectors(s2)
    labels = ("first", "second")
    return {(l1, l2): joint_prob(eff, k1, k2)
            for l1, k1 in zip(labels, p1) for l2, k2 in zip(labels, p2)}


def three_mode_statistics(t: TapConfig, s1: Setting, s2: Setting) -> dict:
    """Full-run statistics with explicit monitor modes, conditioned on
    no monitor click after the fact.

    Each particle occupies C^3 = span{first, second, monitor}; the tap
    acts before the setting, and the setting's ports act on the
    first/second plane only.
    """
    rho1 = math.sqrt(max(0.0, 1.0 - t.tau1 ** 2))
    rho2 = math.sqrt(max(0.0, 1.0 - t.tau2 ** 2))
    s = 1.0 / math.sqrt(2.0)
    state = np.zeros((3, 3), dtype=complex)
    state[0, 0] = s                      # both particles on their first path
    state[1, 1] = s * t.tau1 * t.tau2    # both transmitted past the taps
    state[1, 2] = s * t.tau1 * rho2      # particle 2 diverted to its monitor
    state[2, 1] = s * rho1 * t.tau2
    state[2, 2] = s * rho1 * rho2

    def port_vectors(setting: Setting):
        first, second = setting_projectors(setting)
        vf = np.array([first.amp_plus, first.amp_minus, 0.0], dtype=complex)
        vs = np.array([second.amp_plus, second.amp_minus, 0.0], dtype=complex)
        return (("first", vf), ("second", vs))

    ports1 = port_vectors(s1)
    ports2 = port_vectors(s2)
    kept = {(l1, l2): float(abs(v1.conj() @ state @ v2.conj()) ** 2)
            for l1, v1 in ports1 for l2, v2 in ports2}
    total = sum(kept.values())
    if total <= 0.0:
        return {k: 0.0 for k in kept}
    return {k: v / total for k, v in kept.items()}


def selection_order_agreement(t: TapConfig, s1: Setting, s2: Setting) -> float:
    """Largest absolute difference between the two selection orderings."""
    before = effective_statistics(t, s1, s2)
    after = three_mode_statistics(t, s1, s2)
    return max(abs(before[k] - after[k]) for k in before)


def distillation_report(t: TapConfig) -> dict:
    """Everything the command-line front end reports for one tap pair."""
    res = tap_postselect(t)
    entropy = von_neumann_entropy(partial_trace_second(res.effective))
    obj = {
        "tau1": t.tau1,
        "tau2": t.tau2,
        "Q": res.amplitude_ratio,
        "keep_probability": res.keep_probability,
        "entropy": entropy,
        "max_entropy": math.log(2.0),
    }
    if 0.0 < res.amplitude_ratio < 1.0:
        led = wxhh_ledger(res.amplitude_ratio)
        obj["ledger"] = led.to_obj()
        _, theta, st = _distillation_settings(res.amplitude_ratio)
        obj["matched_angle"] = theta
        obj["settings"] = {
            name: {"phase": s.phase, "transmittance": s.transmittance}
            for name, s in (("A1", st.a1), ("B1", st.b1),
                            ("A2", st.a2), ("B2", st.b2))
        }
        obj["selection_order_max_deviation"] = max(
            selection_order_agreement(t, sa, sb)
            for sa in (st.a1, st.b1) for sb in (st.a2, st.b2))
    else:
        obj["ledger"] = None
        obj["notes"] = ["amplitude ratio outside (0, 1): ladder argument degenerate"]
    return obj
