"""
Forward evolution of instantaneous stabilizer groups under Pauli
measurements, with fully symbolic outcome tracking.

Every measurement outcome and every stabilizer value is an
:class:`OutcomeExpr`: a +/- sign together with a set of symbols.  Symbols
come in three kinds: the unknown initial values of the starting
generators, fresh random bits minted whenever a measurement outcome is
nondeterministic, and error-syndrome bits attached by the error
simulation layer.  Because the bookkeeping is symbolic, the same
simulation validates both syndrome reconstruction (which combinations of
measurement outcomes are deterministic) and sign-exact outcome formulas.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .gf2 import BitMatrix, Combination, _Echelon, in_span, rank
from .pauli import PauliOperator, encode, product, symplectic_product

INITIAL_STABILIZER = "initial-stabilizer"
RANDOM_BIT = "random-bit"
ERROR_SYNDROME = "error-syndrome"

_VALID_KINDS = (INITIAL_STABILIZER, RANDOM_BIT, ERROR_SYNDROME)


class ValidationError(ValueError):
    """Raised when an input fails structural validation."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(str(d) for d in self.diagnostics))


class LogicalMeasurementError(RuntimeError):
    """A measurement acted as a nontrivial logical of the current ISG."""


class CapExceededError(RuntimeError):
    """An enumeration or search cap was exceeded."""


class InternalInvariantError(RuntimeError):
    """An internal consistency check failed; indicates an implementation bug."""


@dataclass(frozen=True)
class OutcomeSymbol:
    """One tracked +/-1 unknown; (kind, index) pairs are unique per run."""

    kind: str
    index: int

    def __post_init__(self) -> None:
        if self.kind not in _VALID_KINDS:
            raise ValueError(f"unknown symbol kind {self.kind!r}")


@dataclass(frozen=True)
class OutcomeExpr:
    """A +/-1 value written as a signed product of symbols.

    Multiplication XORs the signs and takes the symmetric difference of
    the symbol sets, matching how +/-1 products of square-to-one unknowns
    behave.
    """

    sign: int = 0
    symbols: frozenset[OutcomeSymbol] = frozenset()

    def __mul__(self, other: "OutcomeExpr") -> "OutcomeExpr":
        return OutcomeExpr(self.sign ^ other.sign, self.symbols ^ other.symbols)

    def negate(self) -> "OutcomeExpr":
        return OutcomeExpr(self.sign ^ 1, self.symbols)

    def is_deterministic(self) -> bool:
        """True when no random-bit symbols remain in the expression."""
        return all(s.kind != RANDOM_BIT for s in self.symbols)

    def evaluate(self, assignment: dict[OutcomeSymbol, int]) -> int:
        """Evaluate to +/-1 under a symbol assignment (values in {+1,-1})."""
        value = -1 if self.sign else 1
        for symbol in self.symbols:
            value *= assignment[symbol]
        return value


ONE = OutcomeExpr()


def symbol_expr(kind: str, index: int) -> OutcomeExpr:
    return OutcomeExpr(0, frozenset({OutcomeSymbol(kind, index)}))


@dataclass(frozen=True)
class DynamicalCode:
    """A code defined by an initial ISG and rounds of commuting measurements."""

    n: int
    s0: tuple[PauliOperator, ...]
    rounds: tuple[tuple[PauliOperator, ...], ...]
    labels: dict | None = None

    @staticmethod
    def make(n, s0, rounds, labels=None) -> "DynamicalCode":
        return DynamicalCode(
            n, tuple(s0), tuple(tuple(r) for r in rounds), labels
        )

    def measurements(self, window: int | None = None):
        """Yield (round_index, measurement) over the first ``window`` rounds."""
        upto = len(self.rounds) if window is None else window
        for i, rnd in enumerate(self.rounds[:upto], start=1):
            for m in rnd:
                yield i, m


def validate_code(code: DynamicalCode) -> list[dict]:
    """Structural diagnostics for a dynamical code; empty means valid.

    Checks operator sizes, pairwise commutation of the initial generators
    and within every round, and linear independence of the initial set.
    Returns diagnostics rather than raising so callers can report them.
    """
    diagnostics: list[dict] = []
    for where, ops in itertools.chain(
        [("s0", code.s0)],
        ((f"round {i}", rnd) for i, rnd in enumerate(code.rounds, start=1)),
    ):
        for j, op in enumerate(ops):
            if op.n != code.n:
                diagnostics.append(
                    {"kind": "size-mismatch", "where": where, "index": j,
                     "got": op.n, "expected": code.n}
                )
    if any(d["kind"] == "size-mismatch" for d in diagnostics):
        return diagnostics
    for where, ops in itertools.chain(
        [("s0", code.s0)],
        ((f"round {i}", rnd) for i, rnd in enumerate(code.rounds, start=1)),
    ):
        for a in range(len(ops)):
            for b in range(a + 1, len(ops)):
                if symplectic_product(ops[a], ops[b]):
                    diagnostics.append(
                        {"kind": "commutation-violation", "where": where,
                         "pair": (a, b)}
                    )
    if code.s0 and rank([encode(op) for op in code.s0], 2 * code.n) < len(code.s0):
        diagnostics.append({"kind": "dependent-generators", "where": "s0"})
    return diagnostics


@dataclass
class ISGState:
    """An instantaneous stabilizer group with symbolic outcomes.

    ``generators[i]`` currently has value ``outcomes[i]``; ``logicals`` is
    an optional list of (operator, outcome) pairs tracked through the
    evolution.  States are treated as values: ``measure`` returns a new
    state and never mutates its argument.
    """

    n: int
    generators: list[PauliOperator] = field(default_factory=list)
    outcomes: list[OutcomeExpr] = field(default_factory=list)
    logicals: list[tuple[PauliOperator, OutcomeExpr]] | None = None
    rand_counter: int = 0
    events: tuple[dict, ...] = ()

    @staticmethod
    def initial(code: DynamicalCode, track_logicals: bool = False) -> "ISGState":
        """Starting state: each generator carries its own initial symbol.

        With ``track_logicals`` a canonical basis of logical representatives
        is attached, each valued at a fresh random-bit symbol (the encoded
        state's unknown logical content).
        """
        outcomes = [symbol_expr(INITIAL_STABILIZER, i) for i in range(len(code.s0))]
        state = ISGState(code.n, list(code.s0), outcomes)
        if track_logicals:
            pairs = []
            for op, _ in canonical_logicals(code.n, list(code.s0)):
                expr, state.rand_counter = _fresh_random(state)
                pairs.append((op, expr))
            state.logicals = pairs
        return state

    def copy(self) -> "ISGState":
        return ISGState(
            self.n,
            list(self.generators),
            list(self.outcomes),
            None if self.logicals is None else list(self.logicals),
            self.rand_counter,
            self.events,
        )

    def check_abelian(self) -> None:
        gens = self.generators
        for a in range(len(gens)):
            for b in range(a + 1, len(gens)):
                if symplectic_product(gens[a], gens[b]):
                    raise InternalInvariantError(
                        f"ISG generators {a} and {b} anticommute"
                    )


def canonical_logicals(
    n: int, generators: list[PauliOperator]
) -> list[tuple[PauliOperator, OutcomeExpr]]:
    """A deterministic basis of logical representatives for a stabilizer set.

    Returns operators spanning the normalizer modulo the group, each with
    the trivial outcome expression (+1): tracked logicals start in a known
    eigenstate by convention, and callers reassign values as needed.
    """
    from .gf2 import kernel_under_form

    rows = [encode(g) for g in generators]
    normalizer = kernel_under_form(BitMatrix(rows, 2 * n))
    ech = _Echelon(2 * n)
    for row in rows:
        ech.add(row, 0)
    logicals = []
    for vec in normalizer.rows:
        residue, _ = ech.reduce(vec, 0)
        if residue and ech.add(residue, 0):
            from .pauli import decode

            logicals.append((decode(residue, n), ONE))
    return logicals


def _fresh_random(state: ISGState) -> tuple[OutcomeExpr, int]:
    return symbol_expr(RANDOM_BIT, state.rand_counter), state.rand_counter + 1


def update_logical(
    state: ISGState, m: PauliOperator, outcome: OutcomeExpr
) -> list[tuple[PauliOperator, OutcomeExpr]]:
    """Apply the logical update rules for measuring ``m`` on ``state``.

    Must be called with the pre-measurement state: in the rule where the
    logical is multiplied by a replaced generator, the generator chosen
    here is the same lowest-index anticommuting one that the stabilizer
    update removes.  ``outcome`` is the expression recorded for ``m``.
    """
    if state.logicals is None:
        return []
    anti_gens = [
        i for i, g in enumerate(state.generators) if symplectic_product(g, m)
    ]
    s1 = state.generators[anti_gens[0]] if anti_gens else None
    s1_outcome = state.outcomes[anti_gens[0]] if anti_gens else None
    updated = []
    for op, expr in state.logicals:
        if not symplectic_product(op, m):
            # Covers both the plain commuting rule and measuring the
            # logical itself; in either case the representative is kept.
            updated.append((op, expr))
        elif s1 is None:
            # m commutes with the whole group but anticommutes with the
            # logical: the representative is replaced by the measurement.
            updated.append((m, outcome))
        else:
            updated.append((product(op, s1), expr * s1_outcome))
    return updated


def measure(
    state: ISGState, m: PauliOperator, logical_policy: str = "error"
) -> tuple[ISGState, OutcomeExpr]:
    """Measure a Pauli operator, returning the new state and the outcome.

    The three stabilizer update rules:

    1. ``m`` in the group: state unchanged, outcome is the (signed)
       product of the combination's outcome expressions.
    2. ``m`` anticommutes with some generators: the lowest-index such
       generator is replaced by ``m`` with a fresh random-bit outcome and
       every other anticommuting generator is multiplied by the removed
       one, outcomes composing accordingly.
    3. ``m`` independent and commuting: appended with a fresh random bit.

    In rule 3, if ``m`` anticommutes with a tracked logical it is acting
    as a logical measurement.  ``logical_policy`` selects the behavior:
    ``"error"`` raises :class:`LogicalMeasurementError`; ``"track"``
    proceeds, reduces the tracked logical count, and records an event.
    """
    new = state.copy()
    anti = [i for i, g in enumerate(new.generators) if symplectic_product(g, m)]
    if not anti:
        combo = in_span(
            encode(m), BitMatrix([encode(g) for g in new.generators], 2 * m.n)
        )
        if combo is not None:
            outcome = ONE
            for i in combo.indices():
                outcome = outcome * new.outcomes[i]
            return new, outcome
        # Rule 3: independent commuting measurement.
        matching = None
        if new.logicals is not None:
            for op, expr in new.logicals:
                if op == m:
                    matching = expr
                    break
        if matching is not None:
            # Reading out a tracked logical representative directly: the
            # outcome is its tracked value, not fresh randomness.
            outcome = matching
        else:
            outcome, new.rand_counter = _fresh_random(new)
        logical_hit = new.logicals is not None and any(
            symplectic_product(op, m) for op, _ in new.logicals
        )
        if logical_hit:
            if logical_policy == "error":
                raise LogicalMeasurementError(
                    f"measurement {m} acts as a logical operator"
                )
            new.events = new.events + (
                {"kind": "logical-measurement", "measurement": m},
            )
        new.logicals = update_logical(state, m, outcome) or new.logicals
        if new.logicals is not None and logical_hit:
            # The anticommuting representatives were replaced by m itself,
            # which is now a stabilizer: drop them (k-reduction).
            new.logicals = [
                (op, expr) for op, expr in new.logicals if op != m
            ]
        new.generators.append(m)
        new.outcomes.append(outcome)
        return new, outcome
    # Rule 2: replace the lowest-index anticommuting generator.
    outcome, new.rand_counter = _fresh_random(new)
    new.logicals = update_logical(state, m, outcome) or new.logicals
    j = anti[0]
    s1, s1_outcome = new.generators[j], new.outcomes[j]
    for i in anti[1:]:
        new.generators[i] = product(new.generators[i], s1)
        new.outcomes[i] = new.outcomes[i] * s1_outcome
    new.generators[j] = m
    new.outcomes[j] = outcome
    return new, outcome


def apply_error(state: ISGState, e: PauliOperator) -> ISGState:
    """Conjugate the tracked state past a Pauli error.

    Generator and logical outcome expressions flip sign exactly when the
    operator anticommutes with the error.
    """
    new = state.copy()
    for i, g in enumerate(new.generators):
        if symplectic_product(g, e):
            new.outcomes[i] = new.outcomes[i].negate()
    if new.logicals is not None:
        new.logicals = [
            (op, expr.negate() if symplectic_product(op, e) else expr)
            for op, expr in new.logicals
        ]
    return new


@dataclass(frozen=True)
class OracleEntry:
    """Oracle verdict for one element of the initial stabilizer group."""

    combination: Combination
    op: PauliOperator
    unmasked: bool
    formula: tuple[int, ...] | None  # measurement occurrence indices


def simulate_measurements(
    code: DynamicalCode, window: int | None = None,
    errors: dict[int, PauliOperator] | None = None,
    track_logicals: bool = False,
) -> tuple[ISGState, list[tuple[int, PauliOperator, OutcomeExpr]]]:
    """Run the measurement schedule symbolically.

    ``errors`` optionally maps a round index r to a Pauli applied after
    round r's measurements (round 0 means before any measurement).

    Returns the final state and the per-occurrence record
    (occurrence index, operator measured, outcome expression).
    """
    state = ISGState.initial(code, track_logicals=track_logicals)
    if errors and 0 in errors:
        state = apply_error(state, errors[0])
    record = []
    t = 0
    upto = len(code.rounds) if window is None else window
    for round_index, rnd in enumerate(code.rounds[:upto], start=1):
        for m in rnd:
            state, outcome = measure(state, m, logical_policy="track")
            record.append((t, m, outcome))
            t += 1
        if errors and round_index in errors:
            state = apply_error(state, errors[round_index])
    return state, record


def forward_oracle(
    code: DynamicalCode, window: int | None = None, cap: int = 16
) -> list[OracleEntry]:
    """Independent unmasking oracle by exhaustive symbolic simulation.

    Enumerates every element of the initial group and reports it unmasked
    iff some GF(2) combination of measurement outcome expressions contains
    no random-bit symbols and matches the element's initial symbols
    exactly.  Quadratic-exponential in the generator count, so guarded by
    ``cap``; intended as a ground-truth check, not a production path.
    """
    k = len(code.s0)
    if k > cap:
        raise CapExceededError(f"initial group too large to enumerate: {k} > {cap}")
    _, record = simulate_measurements(code, window)
    symbols = sorted(
        {s for _, _, expr in record for s in expr.symbols},
        key=lambda s: (s.kind, s.index),
    )
    col = {s: i for i, s in enumerate(symbols)}
    width = len(symbols)
    ech = _Echelon(width)
    for t, _, expr in record:
        vec = 0
        for s in expr.symbols:
            vec |= 1 << col[s]
        ech.add(vec, 1 << t)
    entries = []
    from .pauli import identity

    for mask in range(1 << k):
        op = identity(code.n)
        target = 0
        for i in range(k):
            if (mask >> i) & 1:
                op = product(op, code.s0[i])
                sym = OutcomeSymbol(INITIAL_STABILIZER, i)
                if sym in col:
                    target ^= 1 << col[sym]
                else:
                    target = -1
                    break
        combo = Combination(mask, k)
        if target < 0:
            entries.append(OracleEntry(combo, op, False, None))
            continue
        residue, meas_combo = ech.reduce(target, 0)
        if residue == 0:
            formula = tuple(
                t for t in range(len(record)) if (meas_combo >> t) & 1
            )
            entries.append(OracleEntry(combo, op, True, formula))
        else:
            entries.append(OracleEntry(combo, op, False, None))
    return entries
