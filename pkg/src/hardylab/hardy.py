"""The one-parameter Hardy state family and both ladder arguments.

The family  a|++> + b(|+-> + |-+>)  with a = cos(theta) and
b = sin(theta)/sqrt(2) interpolates from a product state (theta = 0)
to a maximally entangled state (theta = pi/2).  For 0 < theta < pi/2
the second measurement basis

    plus_b  = N (a|+> + b|->)
    minus_b = N (b|+> - a|->),      N = 1/sqrt(1 - b^2)

supports the four probability claims that exclude local realism
without any inequality, with contradiction probability
((a - a^3)/(1 + a^2))^2.  Both the original ordering of the claims and
the rearranged one are provided as ledgers, computed from the state by
explicit inner products rather than from the closed forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError
from .ledger import TARGET_POSITIVE, Ledger, make_entry
from .qstate import BipartiteKet, SingleKet, joint_prob

LEDGER_TOL = 1e-12

# Golden-ratio conjugate; the contradiction probability peaks at
# a = GRC**1.5 with value GRC**5.
GRC = (math.sqrt(5.0) - 1.0) / 2.0
A_STAR_CLOSED = GRC ** 1.5
P_MAX_CLOSED = GRC ** 5


@dataclass(frozen=True)
class HardyParams:
    """Angle theta in [0, pi/2] plus the derived amplitudes."""

    theta: float

    def __post_init__(self):
        if not (0.0 <= self.theta <= math.pi / 2):
            raise DomainError(f"theta={self.theta!r} outside [0, pi/2]")

    @property
    def a(self) -> float:
        return math.cos(self.theta)

    @property
    def b(self) -> float:
        return math.sin(self.theta) / math.sqrt(2.0)

    @property
    def norm_factor(self) -> float:
        return 1.0 / math.sqrt(1.0 - self.b ** 2)


def hardy_state(theta: float) -> BipartiteKet:
    """Amplitudes (a, b, b, 0) in the fixed basis order."""
    p = HardyParams(theta)
    return BipartiteKet((p.a, p.b, p.b, 0.0))


def hardy_b_basis(theta: float) -> tuple[SingleKet, SingleKet]:
    """The orthonormal pair (plus_b, minus_b) for either particle."""
    p = HardyParams(theta)
    n = p.norm_factor
    plus_b = SingleKet(n * p.a, n * p.b)
    minus_b = SingleKet(n * p.b, -n * p.a)
    return plus_b, minus_b


def p_hardy(a: float) -> float:
    """Contradiction probability ((a - a^3)/(1 + a^2))^2 for a = cos(theta)."""
    return ((a - a ** 3) / (1.0 + a ** 2)) ** 2


def _conditional(psi: BipartiteKet, first: SingleKet | None, second: SingleKet | None,
                 given_first: SingleKet | None, given_second: SingleKet | None,
                 basis1, basis2) -> float | None:
    """P(outcome | given) where exactly one side carries the condition.

    ``basis1``/``basis2`` are the full orthonormal bases used to build
    the marginal of the conditioning outcome.  Returns None when the
    conditioning probability vanishes.
    """
    if given_first is not None:
        marginal = sum(joint_prob(psi, given_first, k) for k in basis2)
        joint = joint_prob(psi, given_first, second)
    else:
        marginal = sum(joint_prob(psi, k, given_second) for k in basis1)
        joint = joint_prob(psi, first, given_second)
    if marginal <= 1e-15:
        return None
    return joint / marginal


def hardy_ledger(theta: float) -> Ledger:
    """The four claims in the original order:
    P(-2 | minus_b 1) = 1, P(-1 | minus_b 2) = 1, P(-1, -2) = 0,
    P(minus_b 1, minus_b 2) > 0.
    """
    psi = hardy_state(theta)
    plus_c = SingleKet(1.0, 0.0)
    minus_c = SingleKet(0.0, 1.0)
    plus_b, minus_b = hardy_b_basis(theta)
    basis_c = (plus_c, minus_c)
    basis_b = (plus_b, minus_b)

    c1 = _conditional(psi, None, minus_c, minus_b, None, basis_b, basis_c)
    c2 = _conditional(psi, minus_c, None, None, minus_b, basis_c, basis_b)
    j3 = joint_prob(psi, minus_c, minus_c)
    j4 = joint_prob(psi, minus_b, minus_b)

    entries = (
        make_entry("H1", "P(-_2 | b-minus_1)", c1, 1.0, LEDGER_TOL),
        make_entry("H2", "P(-_1 | b-minus_2)", c2, 1.0, LEDGER_TOL),
        make_entry("H3", "P(-_1, -_2)", j3, 0.0, LEDGER_TOL),
        make_entry("H4", "P(b-minus_1, b-minus_2)", j4, TARGET_POSITIVE, LEDGER_TOL),
    )
    applicable = entries[3].passed
    notes = () if applicable else ("degenerate state: contradiction probability vanishes",)
    return Ledger("hardy", entries, applicable=applicable, notes=notes)


def goldstein_ledger(theta: float) -> Ledger:
    """The same claims rearranged:
    P(-1, -2) = 0, P(plus_b 1 | +2) = 1, P(plus_b 2 | +1) = 1,
    P(minus_b 1, minus_b 2) > 0.
    """
    psi = hardy_state(theta)
    plus_c = SingleKet(1.0, 0.0)
    minus_c = SingleKet(0.0, 1.0)
    plus_b, minus_b = hardy_b_basis(theta)
    basis_c = (plus_c, minus_c)
    basis_b = (plus_b, minus_b)

    j1 = joint_prob(psi, minus_c, minus_c)
    c2 = _conditional(psi, plus_b, None, None, plus_c, basis_b, basis_c)
    c3 = _conditional(psi, None, plus_b, plus_c, None, basis_c, basis_b)
    j4 = joint_prob(psi, minus_b, minus_b)

    entries = (
        make_entry("G1", "P(-_1, -_2)", j1, 0.0, LEDGER_TOL),
        make_entry("G2", "P(b-plus_1 | +_2)", c2, 1.0, LEDGER_TOL),
        make_entry("G3", "P(b-plus_2 | +_1)", c3, 1.0, LEDGER_TOL),
        make_entry("G4", "P(b-minus_1, b-minus_2)", j4, TARGET_POSITIVE, LEDGER_TOL),
    )
    applicable = entries[3].passed
    notes = () if applicable else ("degenerate state: contradiction probability vanishes",)
    return Ledger("goldstein", entries, applicable=applicable, notes=notes)


def verify_rewrite_forms(theta: float) -> Ledger:
    """Check both hybrid-basis expansions of the state.

    Expanding in (b-basis) x (computational) the coefficients must be
    N(1-b^2), N a b, N b^2 on (plus_b +), (plus_b -), (minus_b -) and
    exactly zero on (minus_b +); symmetrically with the particles
    swapped.
    """
    p = HardyParams(theta)
    psi = hardy_state(theta).mat
    plus_b, minus_b = hardy_b_basis(theta)
    n, a, b = p.norm_factor, p.a, p.b
    plus_c = SingleKet(1.0, 0.0)
    minus_c = SingleKet(0.0, 1.0)

    def coeff(k1: SingleKet, k2: SingleKet) -> complex:
        return complex(k1.vec.conj() @ psi @ k2.vec.conj())

    checks = [
        ("R1-pp", "coeff on (b-plus, +) vs N(1-b^2)", coeff(plus_b, plus_c), n * (1 - b * b)),
        ("R1-pm", "coeff on (b-plus, -) vs N a b", coeff(plus_b, minus_c), n * a * b),
        ("R1-mm", "coeff on (b-minus, -) vs N b^2", coeff(minus_b, minus_c), n * b * b),
        ("R1-mp", "coeff on (b-minus, +) vs 0", coeff(minus_b, plus_c), 0.0),
        ("R2-pp", "coeff on (+, b-plus) vs N(1-b^2)", coeff(plus_c, plus_b), n * (1 - b * b)),
        ("R2-mp", "coeff on (-, b-plus) vs N a b", coeff(minus_c, plus_b), n * a * b),
        ("R2-mm", "coeff on (-, b-minus) vs N b^2", coeff(minus_c, minus_b), n * b * b),
        ("R2-pm", "coeff on (+, b-minus) vs 0", coeff(plus_c, minus_b), 0.0),
    ]
    entries = tuple(
        make_entry(cid, desc, float(abs(got - want)), 0.0, LEDGER_TOL)
        for cid, desc, got, want in checks
    )
    return Ledger("rewrite-forms", entries)


def _golden_section_max(f, lo: float, hi: float, tol: float = 1e-12) -> float:
    """Deterministic golden-section maximization on [lo, hi]."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = hi - invphi * (hi - lo)
    x2 = lo + invphi * (hi - lo)
    f1, f2 = f(x1), f(x2)
    while hi - lo > tol:
        if f1 < f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + invphi * (hi - lo)
            f2 = f(x2)
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - invphi * (hi - lo)
            f1 = f(x1)
    return 0.5 * (lo + hi)


def optimize_hardy(grid_points: int = 10_000) -> tuple[float, float]:
    """Maximize the contradiction probability over a in [0, 1].

    Dense-grid scan followed by golden-section refinement; fully
    deterministic.  Returns (a_star, p_max).
    """
    best_i = 0
    best_v = -1.0
    for i in range(grid_points + 1):
        a = i / grid_points
        v = p_hardy(a)
        if v > best_v:
            best_i, best_v = i, v
    lo = max(0.0, (best_i - 1) / grid_points)
    hi = min(1.0, (best_i + 1) / grid_points)
    a_star = _golden_section_max(p_hardy, lo, hi)
    return a_star, p_hardy(a_star)
