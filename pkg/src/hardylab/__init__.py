"""Verification library for Hardy-type nonlocality constructions on
two-qubit states: the one-parameter state family and its ladder
arguments, the generalized argument with unambiguous state
discrimination and post-selection, interferometric distillation, and a
brute-force local-model feasibility oracle."""

__version__ = "1.0.0"
