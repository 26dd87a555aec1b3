import random

import pytest

from dyncode import (
    DynamicalCode,
    ISGState,
    LogicalMeasurementError,
    apply_error,
    canonical_logicals,
    forward_oracle,
    measure,
    simulate_measurements,
    validate_code,
)
from dyncode.engine import (
    INITIAL_STABILIZER,
    RANDOM_BIT,
    CapExceededError,
    OutcomeSymbol,
    symbol_expr,
)
from dyncode.gf2 import rank
from dyncode.library import shor_code
from dyncode.pauli import encode, parse_pauli, symplectic_product

from oracles import formula_reproduces_stabilizer, random_instance, random_pauli


def code_of(n, s0, rounds):
    return DynamicalCode.make(
        n,
        [parse_pauli(s, n) for s in s0],
        [[parse_pauli(m, n) for m in rnd] for rnd in rounds],
    )


class TestValidate:
    def test_clean_code(self):
        assert validate_code(code_of(2, ["Z1 Z2"], [["X1 X2"]])) == []

    def test_size_mismatch(self):
        code = DynamicalCode.make(3, [parse_pauli("Z1", 2)], [])
        kinds = {d["kind"] for d in validate_code(code)}
        assert kinds == {"size-mismatch"}

    def test_commutation_violation_in_round(self):
        diags = validate_code(code_of(2, [], [["X1", "Z1"]]))
        assert any(d["kind"] == "commutation-violation" for d in diags)

    def test_anticommuting_initial_generators(self):
        diags = validate_code(code_of(2, ["X1", "Z1"], []))
        assert any(d["kind"] == "commutation-violation" for d in diags)

    def test_dependent_initial_generators(self):
        diags = validate_code(code_of(2, ["Z1", "Z2", "Z1 Z2"], []))
        assert any(d["kind"] == "dependent-generators" for d in diags)


class TestMeasureRules:
    def test_in_group_outcome_is_symbol_product(self):
        code = code_of(2, ["Z1", "Z2"], [])
        state = ISGState.initial(code)
        state, outcome = measure(state, parse_pauli("Z1 Z2", 2))
        assert outcome.sign == 0
        assert outcome.symbols == frozenset(
            {OutcomeSymbol(INITIAL_STABILIZER, 0), OutcomeSymbol(INITIAL_STABILIZER, 1)}
        )
        assert len(state.generators) == 2

    def test_anticommuting_replaces_lowest_index(self):
        code = code_of(2, ["Z1", "Z2"], [])
        state = ISGState.initial(code)
        state, outcome = measure(state, parse_pauli("X1 X2", 2))
        assert state.generators[0] == parse_pauli("X1 X2", 2)
        # The other anticommuting generator absorbed the removed one.
        assert state.generators[1] == parse_pauli("Z1 Z2", 2)
        assert outcome == symbol_expr(RANDOM_BIT, 0)

    def test_independent_commuting_appends(self):
        code = code_of(2, ["Z1"], [])
        state = ISGState.initial(code)
        state, outcome = measure(state, parse_pauli("Z2", 2))
        assert state.generators[-1] == parse_pauli("Z2", 2)
        assert outcome == symbol_expr(RANDOM_BIT, 0)

    def test_remeasuring_reproduces_outcome(self):
        code = code_of(3, [], [])
        state = ISGState.initial(code)
        m = parse_pauli("X1 X2", 3)
        state, first = measure(state, m)
        state, second = measure(state, m)
        assert first == second

    def test_measure_does_not_mutate_input(self):
        code = code_of(2, ["Z1"], [])
        state = ISGState.initial(code)
        measure(state, parse_pauli("X1", 2))
        assert state.generators == [parse_pauli("Z1", 2)]

    def test_random_sequences_keep_state_coherent(self):
        rng = random.Random(20240817)
        for _ in range(60):
            code = random_instance(rng)
            state = ISGState.initial(code)
            for _, m in code.measurements():
                state, _ = measure(state, m, logical_policy="track")
                state.check_abelian()
                assert rank(
                    [encode(g) for g in state.generators], 2 * code.n
                ) == len(state.generators)


class TestLogicals:
    def test_canonical_logicals_of_shor(self):
        code = shor_code()
        logicals = canonical_logicals(code.n, list(code.s0))
        assert len(logicals) == 2
        for op, _ in logicals:
            assert all(symplectic_product(op, g) == 0 for g in code.s0)

    def test_measuring_a_logical_raises_by_default(self):
        code = shor_code()
        state = ISGState.initial(code, track_logicals=True)
        logical = state.logicals[0][0]
        with pytest.raises(LogicalMeasurementError):
            measure(state, logical_partner(code, logical))

    def test_track_policy_reduces_logical_count(self):
        code = shor_code()
        state = ISGState.initial(code, track_logicals=True)
        logical = state.logicals[0][0]
        state, _ = measure(
            state, logical_partner(code, logical), logical_policy="track"
        )
        assert len(state.logicals) == 1
        assert state.events and state.events[0]["kind"] == "logical-measurement"

    def test_reading_out_a_tracked_logical_returns_its_value(self):
        code = shor_code()
        state = ISGState.initial(code, track_logicals=True)
        op, expr = state.logicals[0]
        _, outcome = measure(state, op, logical_policy="track")
        assert outcome == expr


def logical_partner(code, logical):
    """Some operator anticommuting with ``logical`` but commuting with s0."""
    from dyncode.gf2 import solve_linear
    from dyncode.pauli import decode, symplectic_partner

    n = code.n
    rows = [symplectic_partner(encode(g), n) for g in code.s0]
    rows.append(symplectic_partner(encode(logical), n))
    rhs = [0] * len(code.s0) + [1]
    particular, _ = solve_linear(rows, rhs, 2 * n)
    return decode(particular, n)


class TestErrorsAndSimulation:
    def test_error_flips_anticommuting_outcomes(self):
        code = code_of(2, ["Z1", "Z2"], [])
        state = ISGState.initial(code)
        flipped = apply_error(state, parse_pauli("X1", 2))
        assert flipped.outcomes[0].sign == 1
        assert flipped.outcomes[1].sign == 0

    def test_simulation_record_covers_every_measurement(self):
        code = shor_code()
        _, record = simulate_measurements(code)
        assert [m for _, m, _ in record] == [m for _, m in code.measurements()]

    def test_error_only_flips_later_determined_outcomes(self):
        # Measuring z1 then x-type error then remeasuring z1 flips the
        # second outcome relative to the first.
        code = code_of(1, [], [["Z1"], ["Z1"]])
        _, record = simulate_measurements(
            code, errors={1: parse_pauli("X1", 1)}
        )
        first, second = record[0][2], record[1][2]
        assert second == first.negate()


class TestForwardOracle:
    def test_known_unmasked_chain(self):
        code = code_of(
            6, ["X1 X2 X3 X4 X5 X6"], [["X1 X2"], ["X3 X4"], ["X5 X6"]]
        )
        entries = forward_oracle(code)
        by_mask = {e.combination.mask: e for e in entries}
        assert by_mask[1].unmasked
        assert by_mask[1].formula == (0, 1, 2)

    def test_masked_after_interruption(self):
        code = code_of(
            6,
            ["X1 X2 X3 X4 X5 X6"],
            [["X1 X2"], ["Z2 Z3"], ["X3 X4"], ["X5 X6"]],
        )
        entries = forward_oracle(code)
        by_mask = {e.combination.mask: e for e in entries}
        assert not by_mask[1].unmasked

    def test_formulas_verify_against_the_record(self):
        rng = random.Random(99)
        for _ in range(40):
            code = random_instance(rng)
            _, record = simulate_measurements(code)
            for entry in forward_oracle(code):
                if entry.unmasked and entry.combination.mask:
                    assert formula_reproduces_stabilizer(
                        code, record, entry.combination.mask, entry.formula
                    )

    def test_cap_guard(self):
        rng = random.Random(1)
        code = random_instance(rng, max_n=5, max_s0=5)
        with pytest.raises(CapExceededError):
            forward_oracle(code, cap=len(code.s0) - 1)
