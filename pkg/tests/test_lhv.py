"""Local-model oracle tests: table construction and validation, the
three canonical verdicts, witness quality, and relabeling invariance."""

import math

import numpy as np
import pytest

from hardylab.discrimination import (
    LABEL_INCONCLUSIVE,
    LABEL_MINUS,
    LABEL_PLUS,
    PovmSetting,
    ProjectiveSetting,
    ud_povm,
)
from hardylab.errors import TableInvalid
from hardylab.hardy import A_STAR_CLOSED, hardy_b_basis, hardy_state, p_hardy
from hardylab.lhv import CorrelationTable, correlation_table, lhv_feasible
from hardylab.qstate import SingleKet

COMP = ((LABEL_PLUS, SingleKet(1.0, 0.0)), (LABEL_MINUS, SingleKet(0.0, 1.0)))


def plain_settings(theta):
    plus_b, minus_b = hardy_b_basis(theta)
    bmeas = ((LABEL_PLUS, plus_b), (LABEL_MINUS, minus_b))
    party1 = (ProjectiveSetting("A1", COMP), ProjectiveSetting("B1", bmeas))
    party2 = (ProjectiveSetting("A2", COMP), ProjectiveSetting("B2", bmeas))
    return party1, party2


def plain_table(theta):
    party1, party2 = plain_settings(theta)
    return correlation_table(hardy_state(theta), party1, party2)


class TestCorrelationTable:
    def test_reproduces_ladder_entries(self):
        theta = 1.1
        table = plain_table(theta)
        d = table.distribution("B1", "B2")
        assert d[(LABEL_MINUS, LABEL_MINUS)] == pytest.approx(
            p_hardy(math.cos(theta)), abs=1e-12)
        d = table.distribution("A1", "A2")
        assert d[(LABEL_MINUS, LABEL_MINUS)] == pytest.approx(0.0, abs=1e-15)
        # conditional certainty: minus_b on particle 1 forces minus on 2
        d = table.distribution("B1", "A2")
        marg = d[(LABEL_MINUS, LABEL_PLUS)] + d[(LABEL_MINUS, LABEL_MINUS)]
        assert d[(LABEL_MINUS, LABEL_MINUS)] / marg == pytest.approx(1.0, abs=1e-12)

    def test_product_state_factorizes(self):
        table = plain_table(0.0)
        for (n1, _), (n2, _) in [(p1, p2) for p1 in table.party1_settings
                                 for p2 in table.party2_settings]:
            d = table.distribution(n1, n2)
            m1 = {o: sum(v for (a, _), v in d.items() if a == o)
                  for o in (LABEL_PLUS, LABEL_MINUS)}
            m2 = {o: sum(v for (_, b), v in d.items() if b == o)
                  for o in (LABEL_PLUS, LABEL_MINUS)}
            for (o1, o2), v in d.items():
                assert v == pytest.approx(m1[o1] * m2[o2], abs=1e-12)

    def test_no_signaling_tight(self):
        table = plain_table(0.8)
        for n1, outs1 in table.party1_settings:
            margs = []
            for n2, _ in table.party2_settings:
                d = table.distribution(n1, n2)
                margs.append([sum(v for (a, _), v in d.items() if a == o)
                              for o in outs1])
            assert max(abs(x - y) for x, y in zip(*margs)) < 1e-12

    def test_invalid_rejected(self):
        cells = (("A1", "A2", "p", "p", 0.6), ("A1", "A2", "p", "m", 0.6),
                 ("A1", "A2", "m", "p", 0.0), ("A1", "A2", "m", "m", 0.0))
        with pytest.raises(TableInvalid):
            CorrelationTable(
                (("A1", ("p", "m")),), (("A2", ("p", "m")),), cells)

    def test_signaling_rejected(self):
        # two settings on particle 2 with inconsistent particle-1 marginals
        cells = (
            ("A1", "A2", "p", "p", 1.0), ("A1", "A2", "p", "m", 0.0),
            ("A1", "A2", "m", "p", 0.0), ("A1", "A2", "m", "m", 0.0),
            ("A1", "B2", "p", "p", 0.0), ("A1", "B2", "p", "m", 0.0),
            ("A1", "B2", "m", "p", 1.0), ("A1", "B2", "m", "m", 0.0),
        )
        with pytest.raises(TableInvalid):
            CorrelationTable((("A1", ("p", "m")),),
                             (("A2", ("p", "m")), ("B2", ("p", "m"))), cells)


class TestVerdicts:
    def test_product_state_feasible(self):
        verdict = lhv_feasible(plain_table(0.0))
        assert verdict.feasible
        assert verdict.residual <= 1e-8

    def test_optimal_ladder_state_infeasible(self):
        theta = math.acos(A_STAR_CLOSED)
        table = plain_table(theta)
        verdict = lhv_feasible(table)
        assert not verdict.feasible
        assert verdict.certificate["margin"] > 1e-10

    def test_certificate_separates(self):
        theta = math.acos(A_STAR_CLOSED)
        table = plain_table(theta)
        verdict = lhv_feasible(table)
        y = verdict.certificate["functional"]
        offset = verdict.certificate["offset"]
        # value on the table
        val = sum(y[f"{n1}|{n2}|{o1}|{o2}"] * p
                  for n1, n2, o1, o2, p in table.cells)
        assert val - offset > 1e-10
        # value on every deterministic strategy
        import itertools
        outs = [o for _, o in table.party1_settings]
        outs2 = [o for _, o in table.party2_settings]
        names = [n for n, _ in table.party1_settings]
        names2 = [n for n, _ in table.party2_settings]
        for c1 in itertools.product(*outs):
            for c2 in itertools.product(*outs2):
                a1 = dict(zip(names, c1))
                a2 = dict(zip(names2, c2))
                sval = sum(y[f"{n1}|{n2}|{o1}|{o2}"]
                           for n1, n2, o1, o2, _ in table.cells
                           if a1[n1] == o1 and a2[n2] == o2)
                assert sval - offset <= 1e-9

    def test_maximal_with_degenerate_settings_feasible(self):
        verdict = lhv_feasible(plain_table(math.pi / 2))
        assert verdict.feasible
        assert verdict.residual <= 1e-8

    def test_feasible_weights_reproduce_table(self):
        table = plain_table(math.pi / 2)
        verdict = lhv_feasible(table)
        total = {}
        for strat, w in verdict.weights:
            if w == 0:
                continue
            a1 = dict(zip(["A1", "B1"], strat[:2]))
            a2 = dict(zip(["A2", "B2"], strat[2:]))
            for n1, n2, o1, o2, _ in table.cells:
                key = (n1, n2, o1, o2)
                if a1[n1] == o1 and a2[n2] == o2:
                    total[key] = total.get(key, 0.0) + w
        for n1, n2, o1, o2, p in table.cells:
            assert total.get((n1, n2, o1, o2), 0.0) == pytest.approx(p, abs=1e-8)

    def test_relabel_invariance(self):
        rng = np.random.default_rng(70)
        theta = math.acos(A_STAR_CLOSED)
        base_verdict = lhv_feasible(plain_table(theta)).feasible
        table = plain_table(theta)
        for _ in range(5):
            # swap the outcome labels of one random setting on one party
            cells = list(table.cells)
            party = rng.integers(2)
            idx = rng.integers(2)
            if party == 0:
                name = table.party1_settings[idx][0]
                cells = [(n1, n2,
                          _swap(o1) if n1 == name else o1, o2, p)
                         for n1, n2, o1, o2, p in cells]
            else:
                name = table.party2_settings[idx][0]
                cells = [(n1, n2, o1,
                          _swap(o2) if n2 == name else o2, p)
                         for n1, n2, o1, o2, p in cells]
            relabeled = CorrelationTable(table.party1_settings,
                                         table.party2_settings,
                                         tuple(sorted(cells)))
            assert lhv_feasible(relabeled).feasible == base_verdict

    def test_three_outcome_table(self):
        # A generalized first setting with an inconclusive outcome:
        # 24 deterministic strategies; the verdict must come back with a
        # self-consistent witness either way.
        theta, alpha, beta = math.pi / 2, math.pi / 3, math.pi / 6
        from hardylab.geometry import ProofAngles, build_bases, derive_geometry

        p = ProofAngles(theta, alpha, beta)
        bases = build_bases(p, derive_geometry(p))
        a1 = PovmSetting("A1", ud_povm(bases.hat_plus_1, bases.hat_minus_1))
        b1 = ProjectiveSetting("B1", ((LABEL_PLUS, bases.oplus_1),
                                      (LABEL_MINUS, bases.ominus_1)))
        a2 = ProjectiveSetting("A2", ((LABEL_PLUS, bases.hat_plus_2),
                                      (LABEL_MINUS, bases.hat_minus_2)))
        b2 = ProjectiveSetting("B2", ((LABEL_PLUS, bases.oplus_2),
                                      (LABEL_MINUS, bases.ominus_2)))
        table = correlation_table(hardy_state(theta), (a1, b1), (a2, b2))
        verdict = lhv_feasible(table)
        if verdict.feasible:
            assert verdict.residual <= 1e-8
        else:
            assert verdict.certificate["margin"] > 1e-10


def _swap(label):
    return LABEL_MINUS if label == LABEL_PLUS else LABEL_PLUS
