"""Pure-state quantum mechanics for two and three qubits.

Conventions used throughout the package:

* Qubit 1 is the most significant bit of the amplitude index, so for two
  qubits the basis order is ``|++>, |+->, |-+>, |-->``.
* Bit value 0 encodes the +1 outcome of the z spin observable, bit value 1
  encodes the -1 outcome.
* Observables are unit Bloch directions ``n . sigma`` with eigenvalues +-1;
  the projector onto outcome ``o`` is ``(I + o n . sigma) / 2``.
* An angle ``theta`` in the x-z plane denotes the direction
  ``(cos theta, 0, sin theta)``, so ``theta = 0`` is x and ``theta = pi/2``
  is z.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce
from itertools import product
from typing import Iterable, Sequence

import numpy as np

from .errors import ContractViolationError, UndefinedConditionalError

NORM_ATOL = 1e-9
CONDITION_FLOOR = 1e-12

PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


def _read_only(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


def outcome_tuples(num_qubits: int) -> tuple[tuple[int, ...], ...]:
    """All outcome tuples in amplitude-index order, +1 before -1."""
    return tuple(product((1, -1), repeat=num_qubits))


def basis_index(outcomes: Sequence[int]) -> int:
    """Amplitude index of an outcome tuple, qubit 1 most significant."""
    index = 0
    for value in outcomes:
        index = (index << 1) | (0 if value == 1 else 1)
    return index


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized pure state of two or three qubits."""

    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        if self.num_qubits not in (2, 3):
            raise ContractViolationError(
                f"expected 2 or 3 qubits, got {self.num_qubits}"
            )
        amplitudes = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amplitudes.size != 2**self.num_qubits:
            raise ContractViolationError(
                f"expected {2 ** self.num_qubits} amplitudes, got {amplitudes.size}"
            )
        norm = float(np.linalg.norm(amplitudes))
        if abs(norm - 1.0) > NORM_ATOL:
            raise ContractViolationError(
                f"state norm {norm!r} deviates from 1 by more than {NORM_ATOL}"
            )
        object.__setattr__(self, "amplitudes", _read_only(amplitudes))

    @property
    def dimension(self) -> int:
        return 2**self.num_qubits


@dataclass(frozen=True)
class Observable:
    """Spin observable along a unit Bloch direction."""

    direction: tuple[float, float, float]

    def __post_init__(self) -> None:
        direction = tuple(float(c) for c in self.direction)
        if len(direction) != 3:
            raise ContractViolationError("direction must have three components")
        norm = math.sqrt(sum(c * c for c in direction))
        if abs(norm - 1.0) > NORM_ATOL:
            raise ContractViolationError(
                f"direction norm {norm!r} deviates from 1 by more than {NORM_ATOL}"
            )
        object.__setattr__(self, "direction", direction)

    @classmethod
    def z(cls) -> "Observable":
        return cls((0.0, 0.0, 1.0))

    @classmethod
    def x(cls) -> "Observable":
        return cls((1.0, 0.0, 0.0))

    @classmethod
    def y(cls) -> "Observable":
        return cls((0.0, 1.0, 0.0))

    @classmethod
    def xz_plane(cls, theta: float) -> "Observable":
        """Observable at angle ``theta`` in the x-z plane."""
        return cls((math.cos(theta), 0.0, math.sin(theta)))

    def matrix(self) -> np.ndarray:
        nx, ny, nz = self.direction
        return nx * PAULI_X + ny * PAULI_Y + nz * PAULI_Z

    def projector(self, outcome: int) -> np.ndarray:
        if outcome not in (1, -1):
            raise ContractViolationError(f"outcome must be +1 or -1, got {outcome!r}")
        return (PAULI_I + outcome * self.matrix()) / 2.0


@dataclass(frozen=True)
class MeasurementContext:
    """One observable per qubit, measured jointly."""

    observables: tuple[Observable, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "observables", tuple(self.observables))
        for obs in self.observables:
            if not isinstance(obs, Observable):
                raise ContractViolationError(f"not an observable: {obs!r}")

    @property
    def num_qubits(self) -> int:
        return len(self.observables)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Two-qubit (or general) density matrix with validated invariants."""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        matrix = np.asarray(self.matrix, dtype=complex)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ContractViolationError(f"density matrix must be square, got {matrix.shape}")
        trace = complex(np.trace(matrix))
        if abs(trace - 1.0) > NORM_ATOL:
            raise ContractViolationError(f"trace {trace!r} deviates from 1")
        if not np.allclose(matrix, matrix.conj().T, atol=NORM_ATOL):
            raise ContractViolationError("density matrix is not Hermitian")
        eigenvalues = np.linalg.eigvalsh(matrix)
        if float(eigenvalues.min()) < -NORM_ATOL:
            raise ContractViolationError(
                f"negative eigenvalue {eigenvalues.min()!r} in density matrix"
            )
        object.__setattr__(self, "matrix", _read_only(matrix))

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]


def _check_context(state: StateVector, context: MeasurementContext) -> None:
    if context.num_qubits != state.num_qubits:
        raise ContractViolationError(
            f"context has {context.num_qubits} observables for a "
            f"{state.num_qubits}-qubit state"
        )


def _check_outcomes(num_qubits: int, outcomes: Sequence[int]) -> tuple[int, ...]:
    outcomes = tuple(outcomes)
    if len(outcomes) != num_qubits:
        raise ContractViolationError(
            f"expected {num_qubits} outcomes, got {len(outcomes)}"
        )
    for value in outcomes:
        if value not in (1, -1):
            raise ContractViolationError(f"outcome must be +1 or -1, got {value!r}")
    return outcomes


def outcome_probability(
    state: StateVector, context: MeasurementContext, outcomes: Sequence[int]
) -> float:
    """Joint probability of one outcome tuple in a measurement context.

    Parameters
    ----------
    state : StateVector
    context : MeasurementContext
        One observable per qubit.
    outcomes : sequence of +1/-1, one per qubit.

    Returns
    -------
    float
        ``|| (P_1 x ... x P_n) |psi> ||^2`` with per-qubit projectors ``P_q``.
    """
    _check_context(state, context)
    outcomes = _check_outcomes(state.num_qubits, outcomes)
    projector = reduce(
        np.kron,
        [obs.projector(o) for obs, o in zip(context.observables, outcomes)],
    )
    projected = projector @ state.amplitudes
    return float(np.real(np.vdot(projected, projected)))


def event_probability(
    state: StateVector,
    context: MeasurementContext,
    accepted: Iterable[Sequence[int]],
) -> float:
    """Probability that the joint outcome falls in a set of tuples."""
    _check_context(state, context)
    unique = sorted({_check_outcomes(state.num_qubits, o) for o in accepted}, reverse=True)
    return sum(outcome_probability(state, context, o) for o in unique)


def conditional_probability(
    state: StateVector,
    context: MeasurementContext,
    accepted: Iterable[Sequence[int]],
    given: Iterable[Sequence[int]],
) -> float:
    """P(accepted | given) for two events in the same context.

    Raises
    ------
    UndefinedConditionalError
        If the conditioning event has probability below 1e-12.
    """
    accepted_set = {_check_outcomes(state.num_qubits, o) for o in accepted}
    given_set = {_check_outcomes(state.num_qubits, o) for o in given}
    given_probability = event_probability(state, context, given_set)
    if given_probability <= CONDITION_FLOOR:
        raise UndefinedConditionalError(
            f"conditioning event has probability {given_probability!r}"
        )
    joint = event_probability(state, context, accepted_set & given_set)
    return joint / given_probability


def correlator(
    state: StateVector,
    context: MeasurementContext,
    subset: Iterable[int] | None = None,
) -> float:
    """Expectation of the product of outcomes over a subset of qubits.

    Parameters
    ----------
    subset : iterable of 1-based qubit indices, defaults to all qubits.

    Returns
    -------
    float
        ``<psi| M |psi>`` where ``M`` tensors the subset observables with
        identities elsewhere.  Marginal correlators do not depend on the
        observables outside the subset.
    """
    _check_context(state, context)
    qubits = (
        tuple(range(1, state.num_qubits + 1)) if subset is None else tuple(sorted(set(subset)))
    )
    if not qubits:
        raise ContractViolationError("correlator subset must be non-empty")
    for q in qubits:
        if not 1 <= q <= state.num_qubits:
            raise ContractViolationError(f"qubit index {q} out of range")
    factors = [
        context.observables[q - 1].matrix() if q in qubits else PAULI_I
        for q in range(1, state.num_qubits + 1)
    ]
    operator = reduce(np.kron, factors)
    return float(np.real(np.vdot(state.amplitudes, operator @ state.amplitudes)))


def partial_trace(state: StateVector, traced_qubit: int) -> DensityMatrix:
    """Reduced two-qubit density matrix after tracing out one qubit of three."""
    if state.num_qubits != 3:
        raise ContractViolationError("partial_trace expects a three-qubit state")
    if not 1 <= traced_qubit <= 3:
        raise ContractViolationError(f"qubit index {traced_qubit} out of range")
    tensor = state.amplitudes.reshape(2, 2, 2)
    kept = np.moveaxis(tensor, traced_qubit - 1, 2).reshape(4, 2)
    return DensityMatrix(kept @ kept.conj().T)


def concurrence(rho: DensityMatrix) -> float:
    """Two-qubit concurrence: ``max(0, l1 - l2 - l3 - l4)`` over the square
    roots of the eigenvalues of ``rho (sy x sy) rho* (sy x sy)`` sorted
    descending."""
    if rho.dimension != 4:
        raise ContractViolationError("concurrence expects a two-qubit density matrix")
    spin_flip = np.kron(PAULI_Y, PAULI_Y)
    flipped = spin_flip @ rho.matrix.conj() @ spin_flip
    eigenvalues = np.linalg.eigvals(rho.matrix @ flipped)
    roots = np.sqrt(np.clip(np.real(eigenvalues), 0.0, None))
    roots[::-1].sort()
    return float(max(0.0, roots[0] - roots[1] - roots[2] - roots[3]))


def permute_qubits(state: StateVector, permutation: Sequence[int]) -> StateVector:
    """Reorder qubits so that new qubit ``i`` is old qubit ``permutation[i-1]``."""
    perm = tuple(permutation)
    if sorted(perm) != list(range(1, state.num_qubits + 1)):
        raise ContractViolationError(f"not a permutation of qubits: {perm!r}")
    tensor = state.amplitudes.reshape((2,) * state.num_qubits)
    reordered = np.transpose(tensor, axes=[q - 1 for q in perm])
    return StateVector(state.num_qubits, reordered.reshape(-1))
