"""Exact small-dimension linear algebra for one- and two-qubit pure states.

Conventions used throughout the package:

* Single-particle kets live in C^2 with components on an abstract
  {|+>, |->} basis.  Amplitudes are complex even though most states of
  interest are real; the interferometer module needs phases.
* Two-particle kets are stored in the fixed product-basis order
  (++, +-, -+, --), i.e. index ``2*i1 + i2`` with ``+ -> 0`` and
  ``- -> 1``.  All serialization uses this order.
* Entropies are in nats (natural logarithm).

Every value is immutable after construction and every operation is pure,
so concurrent use needs no synchronization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidDensity, NotNormalized, NotPsd

BASIS_ORDER = ("++", "+-", "-+", "--")

# Tolerance for norms of states accepted as inputs.
NORM_INPUT_TOL = 1e-9
# Tolerance met by states produced by the package's own constructors.
NORM_CONSTRUCT_TOL = 1e-12
# Hermiticity / positivity slack for operators and density matrices.
OPERATOR_TOL = 1e-12


def _require_finite(values, what: str) -> None:
    for z in values:
        z = complex(z)
        if not (math.isfinite(z.real) and math.isfinite(z.imag)):
            raise ValueError(f"{what} contains a non-finite amplitude: {z!r}")


@dataclass(frozen=True)
class SingleKet:
    """One-particle state with components (amp_plus, amp_minus)."""

    amp_plus: complex
    amp_minus: complex

    def __post_init__(self):
        object.__setattr__(self, "amp_plus", complex(self.amp_plus))
        object.__setattr__(self, "amp_minus", complex(self.amp_minus))
        _require_finite((self.amp_plus, self.amp_minus), "SingleKet")

    @classmethod
    def from_vec(cls, vec) -> "SingleKet":
        v = np.asarray(vec, dtype=complex).reshape(2)
        return cls(v[0], v[1])

    @classmethod
    def rotation(cls, angle: float) -> "SingleKet":
        """The real ket cos(angle)|+> + sin(angle)|->."""
        return cls(math.cos(angle), math.sin(angle))

    @property
    def vec(self) -> np.ndarray:
        return np.array([self.amp_plus, self.amp_minus], dtype=complex)

    def norm2(self) -> float:
        return abs(self.amp_plus) ** 2 + abs(self.amp_minus) ** 2

    def is_normalized(self, tol: float = NORM_INPUT_TOL) -> bool:
        return abs(self.norm2() - 1.0) <= tol

    def require_normalized(self, tol: float = NORM_INPUT_TOL) -> None:
        if not self.is_normalized(tol):
            raise NotNormalized(
                f"squared norm {self.norm2():.17g} differs from 1 by more than {tol:g}"
            )

    def normalized(self) -> "SingleKet":
        n = math.sqrt(self.norm2())
        if n == 0.0:
            raise NotNormalized("cannot normalize the zero vector")
        return SingleKet(self.amp_plus / n, self.amp_minus / n)

    def orthocomplement(self) -> "SingleKet":
        """The unique (up to phase) ket orthogonal to this one."""
        return SingleKet(-self.amp_minus.conjugate(), self.amp_plus.conjugate())


@dataclass(frozen=True)
class BipartiteKet:
    """Two-particle state; amplitudes in the fixed order (++, +-, -+, --)."""

    amps: tuple

    def __post_init__(self):
        amps = tuple(complex(z) for z in self.amps)
        if len(amps) != 4:
            raise ValueError("BipartiteKet needs exactly 4 amplitudes")
        _require_finite(amps, "BipartiteKet")
        object.__setattr__(self, "amps", amps)

    @classmethod
    def from_vec(cls, vec) -> "BipartiteKet":
        v = np.asarray(vec, dtype=complex).reshape(4)
        return cls(tuple(v))

    @classmethod
    def from_mat(cls, mat) -> "BipartiteKet":
        m = np.asarray(mat, dtype=complex).reshape(2, 2)
        return cls((m[0, 0], m[0, 1], m[1, 0], m[1, 1]))

    @property
    def vec(self) -> np.ndarray:
        return np.array(self.amps, dtype=complex)

    @property
    def mat(self) -> np.ndarray:
        """Amplitudes as the 2x2 matrix psi[i1, i2]."""
        return self.vec.reshape(2, 2)

    def norm2(self) -> float:
        return float(sum(abs(z) ** 2 for z in self.amps))

    def is_normalized(self, tol: float = NORM_INPUT_TOL) -> bool:
        return abs(self.norm2() - 1.0) <= tol

    def require_normalized(self, tol: float = NORM_INPUT_TOL) -> None:
        if not self.is_normalized(tol):
            raise NotNormalized(
                f"squared norm {self.norm2():.17g} differs from 1 by more than {tol:g}"
            )

    def normalized(self) -> "BipartiteKet":
        n = math.sqrt(self.norm2())
        if n == 0.0:
            raise NotNormalized("cannot normalize the zero vector")
        return BipartiteKet(tuple(z / n for z in self.amps))


@dataclass(frozen=True)
class Operator2:
    """A 2x2 complex operator with optional hermitian/psd guarantees.

    When a flag is set the corresponding invariant is checked at
    construction (conjugate symmetry within 1e-12; minimum eigenvalue
    >= -1e-12) and a violation raises immediately.
    """

    entries: tuple  # row-major (m00, m01, m10, m11)
    hermitian: bool = False
    psd: bool = False

    def __post_init__(self):
        entries = tuple(complex(z) for z in self.entries)
        if len(entries) != 4:
            raise ValueError("Operator2 needs exactly 4 entries")
        _require_finite(entries, "Operator2")
        object.__setattr__(self, "entries", entries)
        m = self.mat
        if self.hermitian and np.abs(m - m.conj().T).max() > OPERATOR_TOL:
            raise NotPsd("operator flagged hermitian is not hermitian")
        if self.psd:
            if np.abs(m - m.conj().T).max() > OPERATOR_TOL:
                raise NotPsd("operator flagged psd is not hermitian")
            if float(np.linalg.eigvalsh(m).min()) < -OPERATOR_TOL:
                raise NotPsd("operator flagged psd has a negative eigenvalue")

    @classmethod
    def from_mat(cls, mat, hermitian: bool = False, psd: bool = False) -> "Operator2":
        m = np.asarray(mat, dtype=complex).reshape(2, 2)
        return cls((m[0, 0], m[0, 1], m[1, 0], m[1, 1]), hermitian=hermitian, psd=psd)

    @classmethod
    def projector(cls, ket: SingleKet) -> "Operator2":
        v = ket.vec
        return cls.from_mat(np.outer(v, v.conj()), hermitian=True, psd=True)

    @classmethod
    def identity(cls) -> "Operator2":
        return cls((1.0, 0.0, 0.0, 1.0), hermitian=True, psd=True)

    @property
    def mat(self) -> np.ndarray:
        return np.array(self.entries, dtype=complex).reshape(2, 2)

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.mat).min())


@dataclass(frozen=True)
class ReducedState:
    """Single-particle density operator (2x2, hermitian, unit trace, psd)."""

    entries: tuple

    def __post_init__(self):
        entries = tuple(complex(z) for z in self.entries)
        if len(entries) != 4:
            raise ValueError("ReducedState needs exactly 4 entries")
        _require_finite(entries, "ReducedState")
        object.__setattr__(self, "entries", entries)
        m = self.mat
        if np.abs(m - m.conj().T).max() > OPERATOR_TOL:
            raise InvalidDensity("density matrix is not hermitian")
        if abs(np.trace(m).real - 1.0) > OPERATOR_TOL or abs(np.trace(m).imag) > OPERATOR_TOL:
            raise InvalidDensity("density matrix trace differs from 1")
        if float(np.linalg.eigvalsh(m).min()) < -OPERATOR_TOL:
            raise InvalidDensity("density matrix has a negative eigenvalue")

    @classmethod
    def from_mat(cls, mat) -> "ReducedState":
        m = np.asarray(mat, dtype=complex).reshape(2, 2)
        return cls((m[0, 0], m[0, 1], m[1, 0], m[1, 1]))

    @property
    def mat(self) -> np.ndarray:
        return np.array(self.entries, dtype=complex).reshape(2, 2)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.mat)


def inner(bra: SingleKet, ket: SingleKet) -> complex:
    """<bra|ket> on one particle."""
    return complex(np.vdot(bra.vec, ket.vec))


def tensor(k1: SingleKet, k2: SingleKet) -> BipartiteKet:
    """Product state with amps[(s1, s2)] = k1[s1] * k2[s2]."""
    return BipartiteKet.from_vec(np.kron(k1.vec, k2.vec))


def partial_trace_second(psi: BipartiteKet) -> ReducedState:
    """Reduced density operator of particle 1 (trace over particle 2)."""
    psi.require_normalized()
    m = psi.mat
    return ReducedState.from_mat(m @ m.conj().T)


def partial_trace_first(psi: BipartiteKet) -> ReducedState:
    """Reduced density operator of particle 2 (trace over particle 1)."""
    psi.require_normalized()
    m = psi.mat
    return ReducedState.from_mat(m.T @ m.conj())


def von_neumann_entropy(rho: ReducedState) -> float:
    """-sum(lam * ln lam) over the spectrum, with 0 ln 0 = 0.  In nats."""
    lams = rho.eigenvalues()
    s = 0.0
    for lam in lams:
        lam = float(lam)
        if lam > 1e-15:
            s -= lam * math.log(lam)
    return max(s, 0.0)


def joint_prob(psi: BipartiteKet, k1: SingleKet, k2: SingleKet) -> float:
    """|<k1 (x) k2|psi>|^2 for normalized inputs."""
    psi.require_normalized()
    k1.require_normalized()
    k2.require_normalized()
    amp = np.vdot(k1.vec, psi.mat @ k2.vec.conj())
    return float(abs(amp) ** 2)


def povm_joint_prob(psi: BipartiteKet, e1: Operator2, k2: SingleKet) -> float:
    """<psi| (e1 (x) |k2><k2|) |psi> as a real number.

    ``e1`` must be positive semidefinite; the particle-2 factor is the
    projector onto ``k2``.
    """
    psi.require_normalized()
    k2.require_normalized()
    if not e1.psd and e1.min_eigenvalue() < -OPERATOR_TOL:
        raise NotPsd("first-particle operator is not positive semidefinite")
    # <psi|(E (x) P)|psi> = w^H E w with w_i = sum_j psi[i,j] conj(k2[j])
    w = psi.mat @ k2.vec.conj()
    val = np.vdot(w, e1.mat @ w)
    return float(val.real)


def conditional_first(psi: BipartiteKet, k2: SingleKet):
    """Project particle 2 onto ``k2``: returns the (unnormalized)
    particle-1 vector <k2|psi> and its squared norm, which is the
    probability of the ``k2`` outcome."""
    psi.require_normalized()
    k2.require_normalized()
    w = psi.mat @ k2.vec.conj()
    weight = float(np.vdot(w, w).real)
    return SingleKet(w[0], w[1]), weight


def schmidt_coefficients(psi: BipartiteKet) -> np.ndarray:
    """Singular values of the amplitude matrix, descending."""
    return np.linalg.svd(psi.mat, compute_uv=False)


def apply_local(psi: BipartiteKet, u1, u2) -> BipartiteKet:
    """(u1 (x) u2)|psi> for 2x2 matrices or Operator2 values."""
    m1 = u1.mat if isinstance(u1, Operator2) else np.asarray(u1, dtype=complex)
    m2 = u2.mat if isinstance(u2, Operator2) else np.asarray(u2, dtype=complex)
    return BipartiteKet.from_mat(m1 @ psi.mat @ m2.T)


def global_phase_distance(a: BipartiteKet, b: BipartiteKet) -> float:
    """max-norm distance between two kets after optimal global phase."""
    va, vb = a.vec, b.vec
    ov = np.vdot(va, vb)
    phase = ov / abs(ov) if abs(ov) > 1e-300 else 1.0
    return float(np.abs(va * phase - vb).max())


def ket_to_obj(ket) -> list:
    """JSON form: list of [re, im] pairs in the fixed basis order."""
    vec = ket.vec
    return [[float(z.real), float(z.imag)] for z in vec]


def operator_to_obj(op: Operator2) -> list:
    """JSON form: 2x2 nested list of [re, im] pairs (row-major)."""
    m = op.mat
    return [[[float(m[i, j].real), float(m[i, j].imag)] for j in range(2)] for i in range(2)]
