"""Logical nonlocality arguments built from elements of reality.

Three-qubit chain (``run_w_argument``): in the all-z context some fraction
p1 of runs gives at least two -1 results; whenever one qubit's z result is
-1 the x results of the other two agree with certainty (p2, p3); so local
elements of reality force all three x results to be equal in every run that
would have produced two z values of -1.  Quantum mechanics instead gives
x1 = x2 = x3 with probability p4 < p1, leaving a fraction p1 - p4 of runs
with no local explanation.

Two-qubit chain (``run_hardy_argument``): sometimes a1 = a2 = +1 (p1);
always a1 = +1 implies b2 = +1 and a2 = +1 implies b1 = +1 (p2, p3); never
b1 = b2 = +1 (p4).  The same four probabilities assemble into the ch catalog
expression's middle term.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ContractViolationError
from .lhv import SettingScheme, enumerate_strategies
from .qcore import (
    CONDITION_FLOOR,
    MeasurementContext,
    Observable,
    StateVector,
    event_probability,
    outcome_tuples,
)

W_STRUCTURE = "always-always-sometimes"
GHZ_STRUCTURE = "sometimes-always-fewer"
HARDY_STRUCTURE = "sometimes-always-never"

_CYCLIC = ((1, 2, 3), (2, 3, 1), (3, 1, 2))


@dataclass(frozen=True)
class ConditionalCheck:
    """One conditional of an argument chain, vacuous when the premise has
    probability below 1e-12."""

    description: str
    premise_probability: float
    probability: float | None

    @property
    def vacuous(self) -> bool:
        return self.probability is None

    def as_dict(self) -> dict:
        return {
            "description": self.description,
            "premise_probability": self.premise_probability,
            "probability": self.probability,
            "vacuous": self.vacuous,
        }


@dataclass(frozen=True)
class ArgumentReport:
    """The four probabilities of an argument chain and their verdict."""

    state_name: str
    structure: str
    p1: float
    p2: float | None
    p3: float | None
    p4: float
    conditionals: tuple[ConditionalCheck, ...]
    checks_passed: bool
    vacuous: bool
    unexplained_fraction: float
    ch_middle: float | None = field(default=None)

    def as_dict(self) -> dict:
        return {
            "state": self.state_name,
            "structure": self.structure,
            "p1": self.p1,
            "p2": self.p2,
            "p3": self.p3,
            "p4": self.p4,
            "conditionals": [check.as_dict() for check in self.conditionals],
            "checks_passed": self.checks_passed,
            "vacuous": self.vacuous,
            "unexplained_fraction": self.unexplained_fraction,
            "ch_middle": self.ch_middle,
        }


def _mean(values: list[float]) -> float:
    return sum(values) / len(values)


def run_w_argument(
    state: StateVector, state_name: str = "custom", atol: float = 1e-9
) -> ArgumentReport:
    """Evaluate the three-qubit chain on any three-qubit state.

    p1 is the probability of at least two -1 results in the all-z context;
    p2 and p3 average the three cyclic conditionals P(x_j = x_k | z_i = -1)
    and P(x_i = x_k | z_j = -1), which range over the same three distinct
    conditionals in different order, and every one of them is reported; p4 is
    the probability that all three x results agree.  The checks pass when
    every conditional equals 1 within ``atol``; the unexplained fraction is
    then p1 - p4.
    """
    if state.num_qubits != 3:
        raise ContractViolationError("the three-qubit argument needs a three-qubit state")
    z, x = Observable.z(), Observable.x()
    tuples = outcome_tuples(3)

    zzz = MeasurementContext((z, z, z))
    p1 = event_probability(
        state, zzz, [o for o in tuples if sum(1 for v in o if v == -1) >= 2]
    )

    conditionals: list[ConditionalCheck] = []
    values: dict[int, float | None] = {}
    for i, j, k in _CYCLIC:
        observables = [x, x, x]
        observables[i - 1] = z
        context = MeasurementContext(tuple(observables))
        premise = [o for o in tuples if o[i - 1] == -1]
        premise_probability = event_probability(state, context, premise)
        if premise_probability <= CONDITION_FLOOR:
            value: float | None = None
        else:
            joint = event_probability(
                state,
                context,
                [o for o in premise if o[j - 1] == o[k - 1]],
            )
            value = joint / premise_probability
        values[i] = value
        conditionals.append(
            ConditionalCheck(
                description=f"P(x{j} = x{k} | z{i} = -1)",
                premise_probability=premise_probability,
                probability=value,
            )
        )

    xxx = MeasurementContext((x, x, x))
    p4 = event_probability(state, xxx, [(1, 1, 1), (-1, -1, -1)])

    vacuous = any(value is None for value in values.values())
    if vacuous:
        p2 = p3 = None
        checks_passed = False
        unexplained = 0.0
    else:
        # Both conditional families traverse the same three conditionals,
        # one indexed by the conditioning qubit i, the other by j.
        p2 = _mean([values[i] for i, _, _ in _CYCLIC])  # type: ignore[list-item]
        p3 = _mean([values[j] for _, j, _ in _CYCLIC])  # type: ignore[list-item]
        checks_passed = abs(p2 - 1.0) <= atol and abs(p3 - 1.0) <= atol
        unexplained = p1 - p4 if checks_passed else 0.0

    structure = W_STRUCTURE if abs(p1 - 1.0) <= atol else GHZ_STRUCTURE
    return ArgumentReport(
        state_name=state_name,
        structure=structure,
        p1=p1,
        p2=p2,
        p3=p3,
        p4=p4,
        conditionals=tuple(conditionals),
        checks_passed=checks_passed,
        vacuous=vacuous,
        unexplained_fraction=unexplained,
    )


def run_hardy_argument(
    state: StateVector,
    a1: Observable,
    b1: Observable,
    a2: Observable,
    b2: Observable,
    state_name: str = "custom",
    atol: float = 1e-9,
) -> ArgumentReport:
    """Evaluate the sometimes-always-never chain on a two-qubit state.

    Observables a1, b1 act on qubit 1 and a2, b2 on qubit 2.  The report's
    ch_middle field carries the middle term of the ch catalog expression
    evaluated at the same four observables.
    """
    if state.num_qubits != 2:
        raise ContractViolationError("the Hardy argument needs a two-qubit state")

    ctx_aa = MeasurementContext((a1, a2))
    ctx_ab = MeasurementContext((a1, b2))
    ctx_ba = MeasurementContext((b1, a2))
    ctx_bb = MeasurementContext((b1, b2))

    p1 = event_probability(state, ctx_aa, [(1, 1)])
    p4 = event_probability(state, ctx_bb, [(1, 1)])

    premise_a1 = event_probability(state, ctx_ab, [(1, 1), (1, -1)])
    if premise_a1 <= CONDITION_FLOOR:
        p2: float | None = None
    else:
        p2 = event_probability(state, ctx_ab, [(1, 1)]) / premise_a1
    premise_a2 = event_probability(state, ctx_ba, [(1, 1), (-1, 1)])
    if premise_a2 <= CONDITION_FLOOR:
        p3: float | None = None
    else:
        p3 = event_probability(state, ctx_ba, [(1, 1)]) / premise_a2

    ch_middle = (
        p1
        - event_probability(state, ctx_ab, [(1, -1)])
        - event_probability(state, ctx_ba, [(-1, 1)])
        - p4
    )

    conditionals = (
        ConditionalCheck("P(b2 = +1 | a1 = +1)", premise_a1, p2),
        ConditionalCheck("P(b1 = +1 | a2 = +1)", premise_a2, p3),
    )
    vacuous = p2 is None or p3 is None
    checks_passed = (
        not vacuous
        and abs(p2 - 1.0) <= atol  # type: ignore[arg-type]
        and abs(p3 - 1.0) <= atol  # type: ignore[arg-type]
    )
    unexplained = (p1 - p4) if checks_passed else 0.0
    return ArgumentReport(
        state_name=state_name,
        structure=HARDY_STRUCTURE,
        p1=p1,
        p2=p2,
        p3=p3,
        p4=p4,
        conditionals=conditionals,
        checks_passed=checks_passed,
        vacuous=vacuous,
        unexplained_fraction=unexplained,
        ch_middle=ch_middle,
    )


def find_reality_counterexample():
    """Search all 64 deterministic z/x strategies for one that satisfies the
    three-qubit chain's premises yet breaks its conclusion.

    A strategy is constrained by the chain when its z assignment has at
    least two -1 values and, for every qubit i with z_i = -1, the other two
    x values agree.  The chain concludes x1 = x2 = x3.  Returns the first
    violating strategy, or None when the implication holds for all 64.
    """
    scheme = SettingScheme.uniform(3, ("z", "x"))
    for strategy in enumerate_strategies(scheme):
        z = [strategy.outcome(q, "z") for q in (1, 2, 3)]
        x = [strategy.outcome(q, "x") for q in (1, 2, 3)]
        if sum(1 for v in z if v == -1) < 2:
            continue
        premises_hold = all(
            x[j - 1] == x[k - 1]
            for i, j, k in _CYCLIC
            if z[i - 1] == -1
        )
        if premises_hold and not (x[0] == x[1] == x[2]):
            return strategy
    return None
