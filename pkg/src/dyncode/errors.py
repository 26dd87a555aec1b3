"""
Spacetime Pauli errors: syndromes, logical outcomes, and decodability.

The timing convention throughout: the error e_i acts after round i's
measurements and before round i+1's (e_0 acts before any measurement).
Syndromes and logical values are computed from closed-form products over
the error history, so they can be cross-checked against the fully
symbolic forward simulation in the measurement engine.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

from .classify import ClassificationReport, GaugeGroup
from .engine import CapExceededError, DynamicalCode, ValidationError
from .gf2 import Combination, _Echelon
from .pauli import PauliOperator, encode, identity, product, symplectic_product


@dataclass(frozen=True)
class SpacetimeError:
    """Pauli errors indexed by the round after which each one acts."""

    n: int
    by_round: tuple[tuple[int, PauliOperator], ...]

    @staticmethod
    def make(n: int, errors: dict[int, PauliOperator]) -> "SpacetimeError":
        for r, op in errors.items():
            if r < 0:
                raise ValidationError([{"kind": "negative-round", "round": r}])
            if op.n != n:
                raise ValidationError(
                    [{"kind": "size-mismatch", "round": r, "got": op.n}]
                )
        return SpacetimeError(n, tuple(sorted(errors.items())))

    def at(self, round_index: int) -> PauliOperator:
        for r, op in self.by_round:
            if r == round_index:
                return op
        return identity(self.n)

    def net_after(self, round_index: int) -> PauliOperator:
        """Product of all errors acting after round ``round_index``'s
        measurements, i.e. e_j for j >= round_index."""
        acc = identity(self.n)
        for r, op in self.by_round:
            if r >= round_index:
                acc = product(acc, op)
        return acc


def syndrome_of_spacetime_error(
    error: SpacetimeError,
    decomposition: dict[int, PauliOperator],
    stabilizer: PauliOperator,
) -> int:
    """Parity flipped onto a reconstructed syndrome by a spacetime error.

    ``decomposition`` maps round index i to the operator m_i whose round-i
    measurement outcomes enter the syndrome product for ``stabilizer``;
    the product of all m_i must equal the stabilizer.  The flip is
    a = sum_j e_j (.) prod_{i > j} m_i, since an error after round j only
    disturbs the constituents measured later.

    Raises:
        ValidationError: if the decomposition does not multiply to the
            stabilizer.
    """
    acc = identity(stabilizer.n)
    for op in decomposition.values():
        acc = product(acc, op)
    if acc != stabilizer:
        raise ValidationError(
            [{"kind": "decomposition-mismatch", "stabilizer": str(stabilizer)}]
        )
    a = 0
    for j, e in error.by_round:
        tail = identity(stabilizer.n)
        for i, m in decomposition.items():
            if i > j:
                tail = product(tail, m)
        a ^= symplectic_product(e, tail)
    return a


@dataclass
class LogicalTrace:
    """Decomposition of a tracked logical's final representative.

    The final operator factors as l0 * s0_part * prod(round factors),
    where the s0 part is a combination over the code's initial
    generators and each round factor collects the measurement operators
    multiplied into the logical during that round (with the occurrence
    indices whose outcomes enter the value).
    """

    code: DynamicalCode
    l0: PauliOperator
    l_final: PauliOperator
    s0_combination: Combination
    round_factors: dict[int, tuple[PauliOperator, tuple[int, ...]]] = field(
        default_factory=dict
    )
    window: int = 0


def build_logical_trace(
    code: DynamicalCode, l0: PauliOperator, window: int | None = None
) -> LogicalTrace:
    """Track a logical representative through the schedule, with provenance.

    Every ISG generator is carried as (operator, initial-combination,
    occurrence set); when the logical update multiplies the logical by a
    generator, the generator's provenance folds into the trace.  The
    occurrence sets record whose measured outcomes reproduce the
    logical's value in the error-free case.

    Raises:
        ValidationError: if l0 is not a logical of s0 (it must commute
            with every initial generator and lie outside their span).
    """
    if window is None:
        window = len(code.rounds)
    n = code.n
    ech = _Echelon(2 * n)
    for op in code.s0:
        ech.add(encode(op), 0)
    if any(symplectic_product(l0, s) for s in code.s0) or not ech.reduce(
        encode(l0), 0
    )[0]:
        raise ValidationError([{"kind": "not-a-logical", "operator": str(l0)}])

    # Parallel provenance: generator i is gens[i] with initial-combination
    # s0_masks[i] and outcome-occurrence set occ_masks[i].
    gens = list(code.s0)
    s0_masks = [1 << i for i in range(len(code.s0))]
    occ_masks = [0 for _ in code.s0]
    occ_round: dict[int, int] = {}
    log_op = l0
    log_s0 = 0
    log_occ = 0
    t = 0
    for round_index, rnd in enumerate(code.rounds[:window], start=1):
        for m in rnd:
            occ_round[t] = round_index
            anti = [i for i, g in enumerate(gens) if symplectic_product(g, m)]
            if anti:
                j = anti[0]
                s1_op, s1_s0, s1_occ = gens[j], s0_masks[j], occ_masks[j]
                for i in anti[1:]:
                    gens[i] = product(gens[i], s1_op)
                    s0_masks[i] ^= s1_s0
                    occ_masks[i] ^= s1_occ
                gens[j] = m
                s0_masks[j] = 0
                occ_masks[j] = 1 << t
                if symplectic_product(log_op, m):
                    log_op = product(log_op, s1_op)
                    log_s0 ^= s1_s0
                    log_occ ^= s1_occ
            else:
                in_group = _Echelon_reduce(gens, m, n)
                if not in_group:
                    if symplectic_product(log_op, m):
                        raise ValidationError(
                            [{"kind": "logical-measurement", "round": round_index}]
                        )
                    gens.append(m)
                    s0_masks.append(0)
                    occ_masks.append(1 << t)
            t += 1

    factors: dict[int, tuple[PauliOperator, tuple[int, ...]]] = {}
    for occ in range(t):
        if (log_occ >> occ) & 1:
            r = occ_round[occ]
            op, occs = factors.get(r, (identity(n), ()))
            factors[r] = (product(op, _measurement_at(code, occ)), occs + (occ,))
    return LogicalTrace(
        code, l0, log_op, Combination(log_s0, len(code.s0)), factors, window
    )


def _measurement_at(code: DynamicalCode, occurrence: int) -> PauliOperator:
    for t, (_, m) in enumerate(code.measurements()):
        if t == occurrence:
            return m
    raise IndexError(occurrence)


def _Echelon_reduce(gens: list[PauliOperator], m: PauliOperator, n: int) -> bool:
    """True iff m lies in the span of the generators."""
    ech = _Echelon(2 * n)
    for g in gens:
        ech.add(encode(g), 0)
    return ech.reduce(encode(m), 0)[0] == 0


def logical_outcome(
    trace: LogicalTrace,
    error: SpacetimeError,
    l0_value: int,
    initial_values: dict[int, int],
    measurement_values: dict[int, int],
) -> int:
    """Value of the final logical representative under a spacetime error.

    Each factor of the final representative contributes its known value
    times a sign counting the anticommuting errors that occurred after it
    was measured:

        O(L) = O(l0) (-1)^{l0 (.) E_0}
             * O(s0 part) (-1)^{s0 (.) E_0}
             * prod_r [ O(m_r) (-1)^{m_r (.) E_r} ]

    where E_r is the net error from round r onward and O(m_r) is the
    product of the recorded round-r measurement outcomes.

    Args:
        l0_value: +/-1 value of the initial logical.
        initial_values: +/-1 per initial-generator index.
        measurement_values: observed +/-1 outcome per occurrence index.
    """
    e0 = error.net_after(0)
    value = l0_value
    if symplectic_product(trace.l0, e0):
        value = -value
    s0_part = identity(trace.code.n)
    for i in trace.s0_combination.indices():
        value *= initial_values[i]
        s0_part = product(s0_part, trace.code.s0[i])
    if symplectic_product(s0_part, e0):
        value = -value
    for r, (m_op, occurrences) in trace.round_factors.items():
        for occ in occurrences:
            value *= measurement_values[occ]
        if symplectic_product(m_op, error.net_after(r)):
            value = -value
    return value


@dataclass(frozen=True)
class DecodingVerdict:
    """Result of the round-0 pairwise distinguishability check."""

    ok: bool
    applicable: bool
    max_weight: int
    errors_checked: int
    violation: tuple[PauliOperator, PauliOperator] | None = None


def verify_round0_decoding(
    code: DynamicalCode,
    report: ClassificationReport,
    gauge: GaugeGroup,
    max_weight: int,
    unmasked_d: int | None = None,
    enumeration_cap: int = 200000,
) -> DecodingVerdict:
    """Check that round-0 errors up to a weight are decodable.

    Two errors sharing every unmasked-stabilizer syndrome must differ by
    an element of the gauge group; otherwise they corrupt the code
    indistinguishably.  The check is the standard correctability
    condition, required to hold whenever 2*max_weight + 1 <= d_u
    (``applicable``); outside that regime a violation is reported rather
    than asserted against.

    Raises:
        CapExceededError: if the error enumeration exceeds the cap.
    """
    n = code.n
    count = sum(
        _comb(n, w) * 3 ** w for w in range(max_weight + 1)
    )
    if count > enumeration_cap:
        raise CapExceededError(f"{count} errors exceed cap {enumeration_cap}")
    gauge_ech = _Echelon(2 * n)
    for g in gauge.generators:
        gauge_ech.add(encode(g), 0)
    buckets: dict[tuple[int, ...], tuple[int, PauliOperator]] = {}
    checked = 0
    applicable = unmasked_d is not None and 2 * max_weight + 1 <= unmasked_d
    for e in _enumerate_errors(n, max_weight):
        checked += 1
        syndrome = tuple(symplectic_product(e, u.op) for u in report.U)
        residue = gauge_ech.reduce(encode(e), 0)[0]
        if syndrome in buckets:
            prev_residue, prev_e = buckets[syndrome]
            if residue != prev_residue:
                return DecodingVerdict(
                    False, applicable, max_weight, checked, (prev_e, e)
                )
        else:
            buckets[syndrome] = (residue, e)
    return DecodingVerdict(True, applicable, max_weight, checked)


def _comb(n: int, k: int) -> int:
    return math.comb(n, k)


def _enumerate_errors(n: int, max_weight: int):
    yield identity(n)
    for w in range(1, max_weight + 1):
        for support in itertools.combinations(range(n), w):
            for types in itertools.product((1, 2, 3), repeat=w):
                xm = zm = 0
                for q, ty in zip(support, types):
                    if ty & 1:
                        xm |= 1 << q
                    if ty & 2:
                        zm |= 1 << q
                yield PauliOperator(n, xm, zm)
