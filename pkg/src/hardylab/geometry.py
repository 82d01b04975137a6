"""Basis geometry for the generalized ladder argument with one
non-orthogonal first-particle basis.

Starting from a Hardy-family state with angle theta, particle 1 gets the
(generally non-orthogonal) pair

    hat_plus_1  = cos(alpha)|+> + sin(alpha)|->
    hat_minus_1 = -sin(beta)|+> + cos(beta)|->

whose overlap is sin(alpha - beta), and particle 2 a rotation by gamma.
Three constraints fix the remaining angles so that three amplitudes of
the rewritten state vanish:

* gamma:   cot(gamma) = sqrt(2) cot(theta) - cot(alpha)
           kills the (hat_minus, hat_minus) amplitude;
* delta:   c_pp sin(delta - alpha) = c_mp cos(delta - beta)
           kills the (circled_minus_1, hat_plus_2) amplitude;
* epsilon: tan(epsilon) = c_pm / c_pp
           kills the (hat_plus_1, circled_minus_2) amplitude.

With gamma in place the state reads

    scale * (c_pp |hat+ hat+> + c_pm |hat+ hat-> + c_mp |hat- hat+>)

with scale = sec(alpha - beta).  The circled bases are the orthonormal
measurement bases of the argument; on particle 1 the circled pair works
out to a plain rotation by delta of the computational basis, which this
module exploits as a cross-check.

The two-argument arctangent form used for delta above is required for
consistency with the rewritten state; a variant with the roles of c_pp
and c_mp swapped is also computed (``delta_swapped_variant``) so reports
can quantify how far it deviates.  The same applies to the joint
circled-minus probability, where ``cos_variant`` uses cos(delta - alpha)
in place of sin(delta - alpha) (``p_joint_ominus_closed``).

Branch conventions: gamma in (0, pi); delta and epsilon in (-pi, pi]
from atan2.  Probabilities are branch-independent; fixed branches keep
serialized output reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DomainError, SingularAlpha, SingularOverlap
from .ledger import Ledger, make_entry
from .qstate import SingleKet, inner
from .hardy import HardyParams, hardy_state

# Hard admissibility floor for angle parameters.
ANGLE_MARGIN = 1e-9
RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class ProofAngles:
    """Admissible (theta, alpha, beta) for the generalized argument."""

    theta: float
    alpha: float
    beta: float

    def __post_init__(self):
        validate_angles(self.theta, self.alpha, self.beta)

    @property
    def overlap(self) -> float:
        """sin(alpha - beta), the first-particle basis overlap."""
        return math.sin(self.alpha - self.beta)


def validate_angles(theta: float, alpha: float, beta: float,
                    margin: float = ANGLE_MARGIN) -> None:
    """Raise if (theta, alpha, beta) violates the domain constraints."""
    if not (0.0 < theta <= math.pi / 2):
        raise DomainError(f"theta={theta!r} outside (0, pi/2]")
    if abs(math.sin(alpha)) < margin:
        raise SingularAlpha(f"sin(alpha)={math.sin(alpha):.3e} within {margin:g} of 0")
    if abs(math.sin(alpha - beta)) > 1.0 - margin:
        raise SingularOverlap(
            f"|sin(alpha-beta)|={abs(math.sin(alpha - beta)):.12f} within {margin:g} of 1"
        )


@dataclass(frozen=True)
class DerivedGeometry:
    """The seven derived quantities of the construction."""

    gamma: float
    delta: float
    epsilon: float
    scale: float  # sec(alpha - beta)
    c_pp: float   # amplitude on |hat+ hat+>, divided by scale
    c_pm: float   # amplitude on |hat+ hat->
    c_mp: float   # amplitude on |hat- hat+>

    def to_obj(self) -> dict:
        return {
            "gamma": self.gamma,
            "delta": self.delta,
            "epsilon": self.epsilon,
            "scale": self.scale,
            "c_pp": self.c_pp,
            "c_pm": self.c_pm,
            "c_mp": self.c_mp,
        }


def _principal(angle: float) -> float:
    """Map an atan2 result into (-pi, pi] deterministically."""
    if angle <= -math.pi:
        return math.pi
    return angle


def derive_geometry(p: ProofAngles) -> DerivedGeometry:
    """Solve the three vanishing-amplitude constraints."""
    hp = HardyParams(p.theta)
    a, b = hp.a, hp.b
    al, be = p.alpha, p.beta
    # cot(gamma) = sqrt(2)cot(theta) - cot(alpha); branch gamma in (0, pi)
    cot_g = math.sqrt(2.0) * math.cos(p.theta) / math.sin(p.theta) \
        - math.cos(al) / math.sin(al)
    gamma = math.atan2(1.0, cot_g)

    c_pp = a * math.cos(be) * math.cos(gamma) + b * math.sin(be + gamma)
    c_pm = -a * math.cos(be) * math.sin(gamma) + b * math.cos(be + gamma)
    c_mp = -a * math.sin(al) * math.cos(gamma) + b * math.cos(al + gamma)

    scale = 1.0 / math.cos(al - be)
    epsilon = _principal(math.atan2(c_pm, c_pp))
    delta = _principal(math.atan2(
        c_pp * math.sin(al) + c_mp * math.cos(be),
        c_pp * math.cos(al) - c_mp * math.sin(be),
    ))
    return DerivedGeometry(gamma, delta, epsilon, scale, c_pp, c_pm, c_mp)


def delta_swapped_variant(p: ProofAngles, g: DerivedGeometry) -> float:
    """The delta variant with c_pp and c_mp exchanged.

    Inconsistent with the rewritten-state structure; computed only so
    its deviation from ``g.delta`` can be reported.
    """
    return _principal(math.atan2(
        g.c_mp * math.sin(p.alpha) + g.c_pp * math.cos(p.beta),
        g.c_mp * math.cos(p.alpha) - g.c_pp * math.sin(p.beta),
    ))


def angle_deviation_mod_pi(x: float, y: float) -> float:
    """Distance between two angles that are only defined modulo pi."""
    d = (x - y) % math.pi
    return min(d, math.pi - d)


@dataclass(frozen=True)
class ProofBases:
    """All measurement directions of the generalized argument."""

    hat_plus_1: SingleKet
    hat_minus_1: SingleKet
    overlap: float
    hat_plus_2: SingleKet
    hat_minus_2: SingleKet
    oplus_1: SingleKet
    ominus_1: SingleKet
    oplus_2: SingleKet
    ominus_2: SingleKet


def build_bases(p: ProofAngles, g: DerivedGeometry) -> ProofBases:
    """Construct every basis pair literally from its defining formula."""
    al, be = p.alpha, p.beta
    hat_plus_1 = SingleKet.rotation(al)
    hat_minus_1 = SingleKet(-math.sin(be), math.cos(be))
    hat_plus_2 = SingleKet.rotation(g.gamma)
    hat_minus_2 = SingleKet(-math.sin(g.gamma), math.cos(g.gamma))

    # Circled pair on particle 1, written in the hatted (non-orthogonal)
    # basis with the overall factor `scale`; simplifies to a rotation of
    # the computational basis by delta.
    m = g.scale
    cp, sp = math.cos(g.delta - be), math.sin(g.delta - be)
    ca, sa = math.cos(g.delta - al), math.sin(g.delta - al)
    oplus_1 = SingleKet.from_vec(m * (cp * hat_plus_1.vec + sa * hat_minus_1.vec))
    ominus_1 = SingleKet.from_vec(m * (-sp * hat_plus_1.vec + ca * hat_minus_1.vec))

    ce, se = math.cos(g.epsilon), math.sin(g.epsilon)
    oplus_2 = SingleKet.from_vec(ce * hat_plus_2.vec + se * hat_minus_2.vec)
    ominus_2 = SingleKet.from_vec(-se * hat_plus_2.vec + ce * hat_minus_2.vec)

    return ProofBases(
        hat_plus_1, hat_minus_1, float(inner(hat_minus_1, hat_plus_1).real),
        hat_plus_2, hat_minus_2, oplus_1, ominus_1, oplus_2, ominus_2,
    )


def _expand_nonorth_first(psi_mat: np.ndarray, k1a: SingleKet, k1b: SingleKet,
                          basis2: tuple[SingleKet, SingleKet]) -> np.ndarray:
    """Coefficients of psi on {k1a, k1b} x basis2 where the first-particle
    pair may be non-orthogonal (solved as a 2x2 linear system) and basis2
    is orthonormal."""
    coeffs = np.zeros((2, 2), dtype=complex)
    b1 = np.column_stack([k1a.vec, k1b.vec])
    for j, k2 in enumerate(basis2):
        w = psi_mat @ k2.vec.conj()  # particle-1 vector paired with k2
        coeffs[:, j] = np.linalg.solve(b1, w)
    return coeffs


def rewrite_residuals(p: ProofAngles) -> Ledger:
    """Expand the state in the three hybrid bases and compare every
    coefficient with its closed form, including the three vanishing ones."""
    g = derive_geometry(p)
    bases = build_bases(p, g)
    psi = hardy_state(p.theta).mat
    m = g.scale
    al, be = p.alpha, p.beta

    checks: list[tuple[str, str, float, float]] = []

    # Form 1: (hatted 1, non-orthogonal) x (hatted 2)
    c1 = _expand_nonorth_first(psi, bases.hat_plus_1, bases.hat_minus_1,
                               (bases.hat_plus_2, bases.hat_minus_2))
    checks += [
        ("F1-pp", "hat+ hat+ coefficient", abs(c1[0, 0] - m * g.c_pp), 0.0),
        ("F1-pm", "hat+ hat- coefficient", abs(c1[0, 1] - m * g.c_pm), 0.0),
        ("F1-mp", "hat- hat+ coefficient", abs(c1[1, 0] - m * g.c_mp), 0.0),
        ("F1-mm", "hat- hat- coefficient vanishes", abs(c1[1, 1]), 0.0),
    ]

    # Form 2: (circled 1, orthonormal) x (hatted 2)
    def coeff_orth(k1: SingleKet, k2: SingleKet) -> complex:
        return complex(k1.vec.conj() @ psi @ k2.vec.conj())

    da, dbeta = g.delta - al, g.delta - be
    c2_pp = coeff_orth(bases.oplus_1, bases.hat_plus_2)
    c2_pm = coeff_orth(bases.oplus_1, bases.hat_minus_2)
    c2_mp = coeff_orth(bases.ominus_1, bases.hat_plus_2)
    c2_mm = coeff_orth(bases.ominus_1, bases.hat_minus_2)
    checks += [
        ("F2-pp", "circled+ hat+ coefficient",
         abs(c2_pp - m * (g.c_pp * math.cos(da) + g.c_mp * math.sin(dbeta))), 0.0),
        ("F2-pm", "circled+ hat- coefficient",
         abs(c2_pm - m * g.c_pm * math.cos(da)), 0.0),
        ("F2-mp", "circled- hat+ coefficient vanishes", abs(c2_mp), 0.0),
        ("F2-mm", "circled- hat- coefficient",
         abs(c2_mm - (-m * g.c_pm * math.sin(da))), 0.0),
    ]

    # Form 3: (hatted 1, non-orthogonal) x (circled 2)
    c3 = _expand_nonorth_first(psi, bases.hat_plus_1, bases.hat_minus_1,
                               (bases.oplus_2, bases.ominus_2))
    ce, se = math.cos(g.epsilon), math.sin(g.epsilon)
    checks += [
        ("F3-pp", "hat+ circled+ coefficient",
         abs(c3[0, 0] - m * (g.c_pp * ce + g.c_pm * se)), 0.0),
        ("F3-mp", "hat- circled+ coefficient", abs(c3[1, 0] - m * g.c_mp * ce), 0.0),
        ("F3-mm", "hat- circled- coefficient", abs(c3[1, 1] - (-m * g.c_mp * se)), 0.0),
        ("F3-pm", "hat+ circled- coefficient vanishes", abs(c3[0, 1]), 0.0),
    ]

    entries = tuple(make_entry(cid, desc, float(v), want, RESIDUAL_TOL)
                    for cid, desc, v, want in checks)
    return Ledger("rewrite-residuals", entries)


class OminusJointForms(NamedTuple):
    """Closed forms for P(circled-minus 1, circled-minus 2)."""

    main: float            # [scale * c_mp * sin(eps) * cos(delta - beta)]^2
    consistent_alt: float  # [scale * c_pm * sin(delta - alpha) * cos(eps)]^2
    cos_variant: float     # cos(delta - alpha) variant; deviates in general


def p_joint_ominus_closed(p: ProofAngles) -> OminusJointForms:
    g = derive_geometry(p)
    se, ce = math.sin(g.epsilon), math.cos(g.epsilon)
    main = (g.scale * g.c_mp * se * math.cos(g.delta - p.beta)) ** 2
    consistent = (g.scale * g.c_pm * math.sin(g.delta - p.alpha) * ce) ** 2
    cos_var = (g.scale * g.c_pm * ce * math.cos(g.delta - p.alpha)) ** 2
    return OminusJointForms(main, consistent, cos_var)


def derive_arrays(theta: float, alpha: np.ndarray, beta: np.ndarray) -> dict:
    """Vectorized geometry over arrays of (alpha, beta) at fixed theta.

    Used by the sweep engine; returns plain float64 arrays keyed like
    the scalar DerivedGeometry plus the closed joint probability and
    both alternates.  No admissibility checks are performed here.
    """
    a = math.cos(theta)
    b = math.sin(theta) / math.sqrt(2.0)
    al = np.asarray(alpha, dtype=float)
    be = np.asarray(beta, dtype=float)
    cot_g = math.sqrt(2.0) * a / math.sin(theta) - np.cos(al) / np.sin(al)
    gamma = np.arctan2(1.0, cot_g)
    c_pp = a * np.cos(be) * np.cos(gamma) + b * np.sin(be + gamma)
    c_pm = -a * np.cos(be) * np.sin(gamma) + b * np.cos(be + gamma)
    c_mp = -a * np.sin(al) * np.cos(gamma) + b * np.cos(al + gamma)
    scale = 1.0 / np.cos(al - be)
    epsilon = np.arctan2(c_pm, c_pp)
    delta = np.arctan2(c_pp * np.sin(al) + c_mp * np.cos(be),
                       c_pp * np.cos(al) - c_mp * np.sin(be))
    delta_sw = np.arctan2(c_mp * np.sin(al) + c_pp * np.cos(be),
                          c_mp * np.cos(al) - c_pp * np.sin(be))
    se, ce = np.sin(epsilon), np.cos(epsilon)
    p_main = (scale * c_mp * se * np.cos(delta - be)) ** 2
    p_cos_var = (scale * c_pm * ce * np.cos(delta - al)) ** 2
    d_dev = (delta - delta_sw) % math.pi
    d_dev = np.minimum(d_dev, math.pi - d_dev)
    return {
        "gamma": gamma, "delta": delta, "epsilon": epsilon, "scale": scale,
        "c_pp": c_pp, "c_pm": c_pm, "c_mp": c_mp,
        "p_ominus_joint": p_main,
        "p_ominus_cos_variant": p_cos_var,
        "delta_variant_deviation": d_dev,
    }
