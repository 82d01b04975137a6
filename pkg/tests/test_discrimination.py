"""Discrimination-measurement tests: element structure, completeness,
strict unambiguity, and the generic joint-distribution plumbing."""

import math

import numpy as np
import pytest

from hardylab.discrimination import (
    LABEL_INCONCLUSIVE,
    LABEL_MINUS,
    LABEL_PLUS,
    Povm,
    PovmSetting,
    ProjectiveSetting,
    joint_distribution,
    outcome_probs,
    ud_povm,
)
from hardylab.errors import NotPsd, ParallelStates
from hardylab.hardy import hardy_state
from hardylab.qstate import Operator2, SingleKet


def pair_for(alpha: float, beta: float):
    return SingleKet.rotation(alpha), SingleKet(-math.sin(beta), math.cos(beta))


class TestUdPovm:
    def test_orthogonal_limit(self):
        hat_plus, hat_minus = pair_for(0.7, 0.7)
        povm = ud_povm(hat_plus, hat_minus)
        inc = povm.element(LABEL_INCONCLUSIVE)
        assert np.abs(inc.mat).max() < 1e-15
        proj = np.outer(hat_plus.vec, hat_plus.vec.conj())
        assert np.abs(povm.element(LABEL_PLUS).mat - proj).max() < 1e-14

    def test_success_probability(self):
        rng = np.random.default_rng(40)
        for _ in range(300):
            alpha = rng.uniform(0.05, math.pi - 0.05)
            beta = alpha - rng.uniform(-1.4, 1.4)
            s = abs(math.sin(alpha - beta))
            if s > 1 - 1e-6:
                continue
            hat_plus, hat_minus = pair_for(alpha, beta)
            povm = ud_povm(hat_plus, hat_minus)
            on_plus = outcome_probs(hat_plus, povm)
            on_minus = outcome_probs(hat_minus, povm)
            assert on_plus[LABEL_PLUS] == pytest.approx(1 - s, abs=1e-12)
            assert on_minus[LABEL_MINUS] == pytest.approx(1 - s, abs=1e-12)

    def test_spot_half_overlap(self):
        hat_plus, hat_minus = pair_for(math.pi / 3, math.pi / 6)
        povm = ud_povm(hat_plus, hat_minus)
        v = hat_plus.vec
        inc = float(np.vdot(v, povm.element(LABEL_INCONCLUSIVE).mat @ v).real)
        assert inc == pytest.approx(0.5, abs=1e-14)

    def test_bulk_validity(self):
        # Completeness, positivity, unambiguity, and bounded inconclusive
        # spectrum across many random admissible pairs.  The Povm
        # constructor enforces completeness and positivity itself.
        rng = np.random.default_rng(41)
        count = 0
        while count < 10_000:
            alpha = rng.uniform(1e-3, math.pi - 1e-3)
            beta = alpha - rng.uniform(-math.pi / 2 + 1e-3, math.pi / 2 - 1e-3)
            hat_plus, hat_minus = pair_for(alpha, beta)
            povm = ud_povm(hat_plus, hat_minus)
            on_plus = outcome_probs(hat_plus, povm)
            on_minus = outcome_probs(hat_minus, povm)
            assert on_plus[LABEL_MINUS] <= 1e-12
            assert on_minus[LABEL_PLUS] <= 1e-12
            eigs = np.linalg.eigvalsh(povm.element(LABEL_INCONCLUSIVE).mat)
            assert eigs.min() >= -1e-12 and eigs.max() <= 1 + 1e-12
            count += 1

    def test_parallel_states(self):
        with pytest.raises(ParallelStates):
            ud_povm(*pair_for(1.0, 1.0 - math.pi / 2))

    def test_outcome_probs_sum(self):
        rng = np.random.default_rng(42)
        hat_plus, hat_minus = pair_for(1.1, 0.4)
        povm = ud_povm(hat_plus, hat_minus)
        for _ in range(100):
            v = rng.normal(size=2) + 1j * rng.normal(size=2)
            state = SingleKet.from_vec(v / np.linalg.norm(v))
            probs = outcome_probs(state, povm)
            assert sum(probs.values()) == pytest.approx(1.0, abs=1e-12)

    def test_minus_input_distribution(self):
        hat_plus, hat_minus = pair_for(0.9, 0.2)
        s = abs(math.sin(0.7))
        povm = ud_povm(hat_plus, hat_minus)
        probs = outcome_probs(hat_minus, povm)
        assert probs[LABEL_PLUS] == pytest.approx(0.0, abs=1e-14)
        assert probs[LABEL_MINUS] == pytest.approx(1 - s, abs=1e-13)
        assert probs[LABEL_INCONCLUSIVE] == pytest.approx(s, abs=1e-13)


class TestPovmType:
    def test_rejects_incomplete(self):
        half = Operator2.from_mat(np.eye(2) / 2, hermitian=True, psd=True)
        with pytest.raises(NotPsd):
            Povm(((LABEL_PLUS, half),))

    def test_rejects_negative_element(self):
        bad = Operator2.from_mat(np.diag([1.5, 1.0]))
        neg = Operator2.from_mat(np.diag([-0.5, 0.0]))
        with pytest.raises(NotPsd):
            Povm(((LABEL_PLUS, bad), (LABEL_MINUS, neg)))


class TestJointDistribution:
    def test_projective_pair_sums_to_one(self):
        psi = hardy_state(0.8)
        k = SingleKet.rotation(0.3)
        s1 = ProjectiveSetting("S1", ((LABEL_PLUS, k), (LABEL_MINUS, k.orthocomplement())))
        s2 = ProjectiveSetting("S2", ((LABEL_PLUS, SingleKet(1, 0)),
                                      (LABEL_MINUS, SingleKet(0, 1))))
        dist = joint_distribution(psi, s1, s2)
        assert sum(dist.values()) == pytest.approx(1.0, abs=1e-12)

    def test_povm_pair_sums_to_one(self):
        psi = hardy_state(1.2)
        povm = ud_povm(*pair_for(0.9, 0.3))
        s1 = PovmSetting("A1", povm)
        s2 = ProjectiveSetting("A2", ((LABEL_PLUS, SingleKet(1, 0)),
                                      (LABEL_MINUS, SingleKet(0, 1))))
        dist = joint_distribution(psi, s1, s2)
        assert len(dist) == 6
        assert sum(dist.values()) == pytest.approx(1.0, abs=1e-12)
