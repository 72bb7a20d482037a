"""Deterministic strategy enumeration and exact classical bounds.

The frozen bound table was derived by an independent pencil-and-paper pass
over the extremal assignments (and double-checked by the pure-python
strategy_value route inside the dual-route test, which shares no code with
the vectorized enumeration).
"""
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bell3q import (
    BellExpression,
    ContractViolationError,
    CorrelatorTerm,
    DeterministicStrategy,
    EnumerationSizeError,
    SettingScheme,
    Term,
    catalog,
    catalog_ids,
    classical_bounds,
    enumerate_strategies,
    strategy_value,
)

# id -> exact (lower, upper) over all deterministic strategies
FROZEN_BOUNDS = {
    "cabello_ch": (-1.0, 0.0),
    "cabello_ch_literal": (-1.0, 1.0),
    "cabello_ch_fixed": (-1.0, 0.0),
    "mermin": (-2.0, 2.0),
    "eq13": (-5.0, 3.0),
    "eq14": (-8.0, 4.0),
    "chsh": (-2.0, 2.0),
    "ch": (-1.0, 0.0),
}


def test_strategy_counts():
    assert sum(1 for _ in enumerate_strategies(SettingScheme.uniform(3))) == 64
    assert sum(1 for _ in enumerate_strategies(SettingScheme.uniform(2))) == 16


def test_enumeration_order():
    scheme = SettingScheme.uniform(2)
    strategies = list(enumerate_strategies(scheme))
    assert strategies[0].outcomes == (-1, -1, -1, -1)
    assert strategies[-1].outcomes == (1, 1, 1, 1)
    # the last (qubit, label) pair is the least significant position
    assert strategies[1].outcomes == (-1, -1, -1, 1)
    assert strategies[8].outcomes == (1, -1, -1, -1)
    assert len(set(s.outcomes for s in strategies)) == 16


def test_strategy_lookup_and_dict():
    scheme = SettingScheme.uniform(2)
    strategy = DeterministicStrategy(scheme, (1, -1, -1, 1))
    assert strategy.outcome(1, "A") == 1
    assert strategy.outcome(1, "B") == -1
    assert strategy.outcome(2, "B") == 1
    assert strategy.as_dict() == {"q1:A": 1, "q1:B": -1, "q2:A": -1, "q2:B": 1}
    with pytest.raises(ContractViolationError):
        strategy.outcome(3, "A")
    with pytest.raises(ContractViolationError):
        strategy.outcome(1, "C")


def test_strategy_contracts():
    scheme = SettingScheme.uniform(2)
    with pytest.raises(ContractViolationError):
        DeterministicStrategy(scheme, (1, -1, -1))
    with pytest.raises(ContractViolationError):
        DeterministicStrategy(scheme, (1, -1, -1, 0))


def test_scheme_contracts():
    with pytest.raises(ContractViolationError):
        SettingScheme(())
    with pytest.raises(ContractViolationError):
        SettingScheme((("A", "A"),))
    with pytest.raises(ContractViolationError):
        SettingScheme((("A",), ()))
    scheme = SettingScheme((("A", "B"), ("C",)))
    assert scheme.pairs() == ((1, "A"), (1, "B"), (2, "C"))
    assert scheme.labels_for(2) == ("C",)


def test_catalog_bounds_frozen():
    assert set(FROZEN_BOUNDS) == set(catalog_ids())
    for name, (lower, upper) in FROZEN_BOUNDS.items():
        bounds = classical_bounds(catalog(name))
        assert (bounds.lower, bounds.upper) == (lower, upper), name
        expected_count = 2 ** catalog(name).scheme.total_labels
        assert bounds.strategy_count == expected_count


def test_bounds_witnesses_reproduce_extremes():
    for name in catalog_ids():
        expression = catalog(name)
        bounds = classical_bounds(expression)
        assert strategy_value(expression, bounds.minimizer) == pytest.approx(
            bounds.lower, abs=0.0
        )
        assert strategy_value(expression, bounds.maximizer) == pytest.approx(
            bounds.upper, abs=0.0
        )


def test_vectorized_bounds_match_pure_python_loop():
    # dual route: explicit loop over strategy_value against the int8 columns
    for name in catalog_ids():
        expression = catalog(name)
        values = [
            strategy_value(expression, strategy)
            for strategy in enumerate_strategies(expression.scheme)
        ]
        bounds = classical_bounds(expression)
        assert min(values) == pytest.approx(bounds.lower, abs=0.0)
        assert max(values) == pytest.approx(bounds.upper, abs=0.0)


def test_mermin_all_plus_strategy():
    expression = catalog("mermin")
    all_plus = DeterministicStrategy(expression.scheme, (1,) * 6)
    assert strategy_value(expression, all_plus) == pytest.approx(-2.0)


def test_eq13_all_plus_strategy():
    # the three pairwise product terms add -3 on top of the mermin -2
    expression = catalog("eq13")
    all_plus = DeterministicStrategy(expression.scheme, (1,) * 6)
    assert strategy_value(expression, all_plus) == pytest.approx(-5.0)


def test_literal_reaches_plus_one():
    # A = (-1, +1, -1) puts two -1s in the opening event while the retained
    # pair of mismatch terms misses the disagreement pattern B = (+1, -1, -1),
    # so the four-term literal reading climbs to +1
    expression = catalog("cabello_ch_literal")
    strategy = DeterministicStrategy(expression.scheme, (-1, 1, 1, -1, -1, -1))
    assert strategy.outcome(1, "A") == -1
    assert strategy.outcome(2, "A") == 1
    assert strategy.outcome(3, "A") == -1
    assert strategy_value(expression, strategy) == pytest.approx(1.0)
    # the symmetrized five-term form keeps the same strategy at 0
    assert strategy_value(catalog("cabello_ch"), strategy) == pytest.approx(0.0)


def test_enumeration_size_guard():
    wide = SettingScheme.uniform(3, tuple("ABCDEFGHI"))
    assert wide.total_labels == 27
    with pytest.raises(EnumerationSizeError):
        list(enumerate_strategies(wide))
    expression = BellExpression(
        "wide",
        wide,
        (Term(1.0, CorrelatorTerm(("A", "A", "A"), frozenset((1, 2, 3)))),),
    )
    with pytest.raises(EnumerationSizeError):
        classical_bounds(expression)


@settings(max_examples=30, deadline=None)
@given(
    coefficients=st.lists(
        st.floats(-3.0, 3.0, allow_nan=False), min_size=3, max_size=3
    ),
    sample=st.integers(min_value=0, max_value=15),
)
def test_every_strategy_sits_inside_the_bounds(coefficients, sample):
    scheme = SettingScheme.uniform(2)
    expression = BellExpression(
        "random",
        scheme,
        (
            Term(coefficients[0], CorrelatorTerm(("A", "A"), frozenset((1, 2)))),
            Term(coefficients[1], CorrelatorTerm(("A", "B"), frozenset((1, 2)))),
            Term(coefficients[2], CorrelatorTerm(("B", "B"), frozenset((2,)))),
        ),
    )
    bounds = classical_bounds(expression)
    strategy = list(enumerate_strategies(scheme))[sample]
    value = strategy_value(expression, strategy)
    assert bounds.lower - 1e-9 <= value <= bounds.upper + 1e-9
