"""Unambiguous discrimination of two non-orthogonal single-particle
states, and generic measurement-setting plumbing.

For a pair {hat_plus, hat_minus} with overlap s = |<hat_minus|hat_plus>|
the three-outcome measurement

    E_plus         = (1 - |hat_minus><hat_minus|) / (1 + s)
    E_minus        = (1 - |hat_plus><hat_plus|)  / (1 + s)
    E_inconclusive = 1 - (2*1 - |hat_plus><hat_plus|
                              - |hat_minus><hat_minus|) / (1 + s)

never misidentifies either state and succeeds with probability 1 - s on
each; the three elements sum to the identity exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotPsd, ParallelStates
from .qstate import (
    BipartiteKet,
    Operator2,
    SingleKet,
    inner,
    joint_prob,
    operator_to_obj,
    povm_joint_prob,
)

LABEL_PLUS = "plus"
LABEL_MINUS = "minus"
LABEL_INCONCLUSIVE = "inconclusive"

COMPLETENESS_TOL = 1e-12


@dataclass(frozen=True)
class Povm:
    """Labeled positive operators summing to the identity."""

    elements: tuple  # of (label, Operator2)

    def __post_init__(self):
        total = np.zeros((2, 2), dtype=complex)
        for label, op in self.elements:
            if op.min_eigenvalue() < -COMPLETENESS_TOL:
                raise NotPsd(f"element {label!r} has a negative eigenvalue")
            total += op.mat
        if np.abs(total - np.eye(2)).max() > COMPLETENESS_TOL:
            raise NotPsd("elements do not sum to the identity")

    def element(self, label: str) -> Operator2:
        for lab, op in self.elements:
            if lab == label:
                return op
        raise KeyError(label)

    @property
    def labels(self) -> tuple:
        return tuple(lab for lab, _ in self.elements)

    def to_obj(self) -> dict:
        return {lab: operator_to_obj(op) for lab, op in self.elements}


def ud_povm(hat_plus: SingleKet, hat_minus: SingleKet) -> Povm:
    """The unambiguous-discrimination measurement for the given pair."""
    hat_plus.require_normalized()
    hat_minus.require_normalized()
    s_ov = abs(inner(hat_minus, hat_plus))
    if s_ov >= 1.0 - 1e-9:
        raise ParallelStates(f"overlap {s_ov:.12f} too close to 1")
    eye = np.eye(2)
    proj_p = np.outer(hat_plus.vec, hat_plus.vec.conj())
    proj_m = np.outer(hat_minus.vec, hat_minus.vec.conj())
    e_plus = (eye - proj_m) / (1.0 + s_ov)
    e_minus = (eye - proj_p) / (1.0 + s_ov)
    e_inc = eye - (2.0 * eye - proj_p - proj_m) / (1.0 + s_ov)
    return Povm((
        (LABEL_PLUS, Operator2.from_mat(e_plus, hermitian=True, psd=True)),
        (LABEL_MINUS, Operator2.from_mat(e_minus, hermitian=True, psd=True)),
        (LABEL_INCONCLUSIVE, Operator2.from_mat(e_inc, hermitian=True, psd=True)),
    ))


def outcome_probs(state1: SingleKet, povm: Povm) -> dict:
    """Outcome distribution <state|E|state> for a single particle."""
    state1.require_normalized()
    v = state1.vec
    return {lab: float(np.vdot(v, op.mat @ v).real) for lab, op in povm.elements}


# ---------------------------------------------------------------------------
# Measurement settings on one particle of a pair, and joint distributions.

@dataclass(frozen=True)
class ProjectiveSetting:
    """A named two-outcome von Neumann measurement."""

    name: str
    outcomes: tuple  # of (label, SingleKet), an orthonormal pair

    @property
    def labels(self) -> tuple:
        return tuple(lab for lab, _ in self.outcomes)


@dataclass(frozen=True)
class PovmSetting:
    """A named generalized measurement."""

    name: str
    povm: Povm

    @property
    def labels(self) -> tuple:
        return self.povm.labels


Setting = ProjectiveSetting | PovmSetting


def joint_distribution(psi: BipartiteKet, s1: Setting, s2: ProjectiveSetting) -> dict:
    """Joint outcome distribution for one settings pair.

    The first particle may carry either a projective or a POVM setting;
    the second is projective.  Keys are (label1, label2).
    """
    dist = {}
    if isinstance(s1, ProjectiveSetting):
        for l1, k1 in s1.outcomes:
            for l2, k2 in s2.outcomes:
                dist[(l1, l2)] = joint_prob(psi, k1, k2)
    else:
        for l1, op in s1.povm.elements:
            for l2, k2 in s2.outcomes:
                dist[(l1, l2)] = povm_joint_prob(psi, op, k2)
    return dist
