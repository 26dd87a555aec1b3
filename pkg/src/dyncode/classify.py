"""
Classification of initial-round stabilizers under a measurement schedule,
and the three distance notions built on top of it.

Two tracked sets drive the classification.  ``C`` follows the evolution
of the initial generators: each element carries the initial-group
combination it is "associated" with, plus the known outcome of (element *
associated stabilizer), which is always a product of measurement
outcomes.  ``V`` collects an independent set of operators generated by
the measurements themselves, each with a known outcome.  Together they
generate the current ISG.  After the window, the intersection of the two
spans yields every syndrome that the schedule reveals; removals from C
are staged and replayed backwards to recover permanently masked
stabilizers together with their destabilizers.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .engine import (
    ONE,
    RANDOM_BIT,
    CapExceededError,
    DynamicalCode,
    InternalInvariantError,
    OutcomeExpr,
    ValidationError,
    symbol_expr,
    validate_code,
)
from .gf2 import (
    BitMatrix,
    Combination,
    _Echelon,
    in_span,
    kernel_under_form,
    minimize_over_span,
    nullspace,
    rank,
    solve_linear,
    span_intersection,
)
from .pauli import (
    PauliOperator,
    decode,
    encode,
    product,
    symplectic_partner,
    symplectic_product,
)


@dataclass
class TrackedPauli:
    """An element of C or V with its provenance.

    For C elements, ``assoc`` is the combination over the initial
    generators giving the associated stabilizer, and ``carry`` is the
    outcome of (op * associated stabilizer).  For V elements ``assoc`` is
    None and ``carry`` is the known outcome of ``op`` itself.
    """

    op: PauliOperator
    assoc: Combination | None
    carry: OutcomeExpr


@dataclass(frozen=True)
class RemovalEvent:
    """A generator dropped from C (kind "C") or V (kind "V") mid-schedule."""

    round_index: int
    kind: str
    op: PauliOperator
    assoc: Combination | None
    carry: OutcomeExpr


@dataclass(frozen=True)
class UnmaskedStabilizer:
    op: PauliOperator
    combination: Combination
    syndrome: OutcomeExpr


@dataclass
class ClassificationReport:
    """Output of the classification: the partition U / T / P plus destabilizers.

    ``U[j].syndrome`` is the product of measurement outcomes revealing
    that stabilizer.  ``K[j]`` is the destabilizer paired with ``P[j]``.
    ``tags[i]`` classifies initial generator i.
    """

    n: int
    window: int
    s0: tuple[PauliOperator, ...]
    U: list[UnmaskedStabilizer]
    T: list[PauliOperator]
    P: list[PauliOperator]
    K: list[PauliOperator]
    tags: list[str]
    C_final: list[TrackedPauli] = field(default_factory=list)
    V_final: list[TrackedPauli] = field(default_factory=list)
    removals: list[RemovalEvent] = field(default_factory=list)

    def element_class(self, op: PauliOperator) -> str:
        """Classify an arbitrary element of the initial group.

        Products mixing the three kinds classify by the strongest masking
        present: any permanently masked factor makes the element
        permanently masked, else any temporarily masked factor makes it
        temporarily masked.
        """
        basis_rows = (
            [encode(u.op) for u in self.U]
            + [encode(t) for t in self.T]
            + [encode(p) for p in self.P]
        )
        combo = in_span(encode(op), BitMatrix(basis_rows, 2 * self.n))
        if combo is None:
            raise ValueError("operator is not in the initial stabilizer group")
        nu, nt = len(self.U), len(self.T)
        idx = combo.indices()
        if any(i >= nu + nt for i in idx):
            return "permanently-masked"
        if any(nu <= i < nu + nt for i in idx):
            return "temporarily-masked"
        return "unmasked"


def _anti_indices(tracked: list[TrackedPauli], m: PauliOperator) -> list[int]:
    return [i for i, t in enumerate(tracked) if symplectic_product(t.op, m)]


def run_classification(code: DynamicalCode, window: int | None = None) -> ClassificationReport:
    """Classify the initial generators over a measurement window.

    Processes each measurement through the four commutation cases,
    intersects the spans of C and V at the end of the window, and derives
    the unmasked set with syndrome formulas, the permanently masked set
    with destabilizers (via the reversed-schedule replay), and the
    temporarily masked remainder.

    Raises:
        ValidationError: if the code fails structural validation.
        InternalInvariantError: if the derived partition violates its
            completeness/independence invariants (implementation bug).
    """
    diagnostics = validate_code(code)
    if diagnostics:
        raise ValidationError(diagnostics)
    if window is None:
        window = len(code.rounds)
    if window > len(code.rounds):
        raise ValidationError(
            [{"kind": "window-too-large", "window": window, "rounds": len(code.rounds)}]
        )
    k = len(code.s0)
    C: list[TrackedPauli] = [
        TrackedPauli(op, Combination(1 << i, k), ONE) for i, op in enumerate(code.s0)
    ]
    V: list[TrackedPauli] = []
    removals: list[RemovalEvent] = []
    t = 0
    for round_index, rnd in enumerate(code.rounds[:window], start=1):
        for m in rnd:
            outcome = symbol_expr(RANDOM_BIT, t)
            t += 1
            anti_c = _anti_indices(C, m)
            anti_v = _anti_indices(V, m)
            if not anti_c and not anti_v:
                # Case 1: add to V only if independent of it.
                if in_span(encode(m), BitMatrix([encode(v.op) for v in V], 2 * code.n)) is None:
                    V.append(TrackedPauli(m, None, outcome))
            elif anti_c and not anti_v:
                # Case 2: a tracked initial generator is destroyed.
                V.append(TrackedPauli(m, None, outcome))
                j = anti_c[0]
                cj = C[j]
                for i in anti_c[1:]:
                    C[i] = TrackedPauli(
                        product(C[i].op, cj.op),
                        Combination(C[i].assoc.mask ^ cj.assoc.mask, k),
                        C[i].carry * cj.carry,
                    )
                removals.append(
                    RemovalEvent(round_index, "C", cj.op, cj.assoc, cj.carry)
                )
                del C[j]
            elif anti_v and not anti_c:
                # Case 3: stabilizer update within V.
                V.append(TrackedPauli(m, None, outcome))
                j = anti_v[0]
                vj = V[j]
                for i in anti_v[1:]:
                    V[i] = TrackedPauli(
                        product(V[i].op, vj.op), None, V[i].carry * vj.carry
                    )
                removals.append(RemovalEvent(round_index, "V", vj.op, None, vj.carry))
                del V[j]
            else:
                # Case 4: both sets are hit; V loses a generator and the
                # affected C elements absorb it, composing their carries
                # with its outcome.
                V.append(TrackedPauli(m, None, outcome))
                j = anti_v[0]
                vj = V[j]
                for i in anti_v[1:]:
                    V[i] = TrackedPauli(
                        product(V[i].op, vj.op), None, V[i].carry * vj.carry
                    )
                for i in anti_c:
                    C[i] = TrackedPauli(
                        product(C[i].op, vj.op), C[i].assoc, C[i].carry * vj.carry
                    )
                removals.append(RemovalEvent(round_index, "V", vj.op, None, vj.carry))
                del V[j]

    U = _extract_unmasked(code, C, V)
    P, K = _extract_permanently_masked(code, window, C, V, removals)
    T = _extract_temporarily_masked(code, C, U, P)
    _check_partition(code, U, T, P, K)
    report = ClassificationReport(
        n=code.n, window=window, s0=code.s0, U=U, T=T, P=P, K=K,
        tags=[], C_final=C, V_final=V, removals=removals,
    )
    report.tags = [report.element_class(op) for op in code.s0]
    return report


def _extract_unmasked(
    code: DynamicalCode, C: list[TrackedPauli], V: list[TrackedPauli]
) -> list[UnmaskedStabilizer]:
    """Read the revealed syndromes off the intersection of the two spans.

    Every intersection generator u lies in the span of V (its outcome is
    a product of known measurement outcomes) and in the span of C (it
    carries an associated initial stabilizer s with known outcome of
    u*s); the product of the two outcomes is the syndrome of s.  Zero
    rows of the block matrix are dependencies among C and contribute
    their associated stabilizers with the carry alone.
    """
    k = len(code.s0)
    width = 2 * code.n
    c_rows = BitMatrix([encode(c.op) for c in C], width)
    v_rows = BitMatrix([encode(v.op) for v in V], width)
    elements, redundancies = span_intersection(c_rows, v_rows)
    ech = _Echelon(width)
    unmasked: list[UnmaskedStabilizer] = []
    for entry in itertools.chain(elements, redundancies):
        assoc_mask = 0
        carry = ONE
        for i in entry.left_combo.indices():
            assoc_mask ^= C[i].assoc.mask
            carry = carry * C[i].carry
        outcome_u = ONE
        for i in entry.right_combo.indices():
            outcome_u = outcome_u * V[i].carry
        s_vec = 0
        for i in range(k):
            if (assoc_mask >> i) & 1:
                s_vec ^= encode(code.s0[i])
        if assoc_mask == 0 or not ech.add(s_vec, 0):
            continue
        unmasked.append(
            UnmaskedStabilizer(
                decode(s_vec, code.n),
                Combination(assoc_mask, k),
                outcome_u * carry,
            )
        )
    return unmasked


def _extract_permanently_masked(
    code: DynamicalCode,
    window: int,
    C: list[TrackedPauli],
    V: list[TrackedPauli],
    removals: list[RemovalEvent],
) -> tuple[list[PauliOperator], list[PauliOperator]]:
    """Recover permanently masked stabilizers and destabilizers by replay.

    The final ISG is evolved backwards by "measuring" the removed
    elements in reverse order.  Each element that was removed from C
    pairs with the group element that anticommutes with it at that point;
    the pair behaves as the two logical operators of a gauge qubit and is
    propagated back to round 0 by the ordinary update rules.
    """
    width = 2 * code.n
    # Generators of the final ISG.
    R: list[PauliOperator] = []
    ech = _Echelon(width)
    for tracked in itertools.chain(C, V):
        if ech.add(encode(tracked.op), 0):
            R.append(tracked.op)
    # Reversed schedule: removals of round r replay in round (window-r+1),
    # most recent removals first.
    reversed_rounds: list[list[RemovalEvent]] = [[] for _ in range(window)]
    for event in reversed(removals):
        reversed_rounds[window - event.round_index].append(event)
    pairs: list[list[PauliOperator]] = []
    for rnd in reversed_rounds:
        for event in rnd:
            m = event.op
            anti_r = [i for i, r in enumerate(R) if symplectic_product(r, m)]
            if event.kind == "C":
                if not anti_r:
                    raise InternalInvariantError(
                        "staged removal has no anticommuting partner in replay"
                    )
                s = R[anti_r[0]]
                for i in anti_r[1:]:
                    R[i] = product(R[i], s)
                del R[anti_r[0]]
                for pair in pairs:
                    for idx in (0, 1):
                        if symplectic_product(pair[idx], m):
                            pair[idx] = product(pair[idx], s)
                pairs.append([m, s])
            else:
                if not anti_r:
                    if in_span(encode(m), BitMatrix([encode(r) for r in R], width)) is None:
                        if any(
                            symplectic_product(pair[idx], m)
                            for pair in pairs for idx in (0, 1)
                        ):
                            raise InternalInvariantError(
                                "replay measurement acts as a gauge logical"
                            )
                        R.append(m)
                    continue
                s1 = R[anti_r[0]]
                for i in anti_r[1:]:
                    R[i] = product(R[i], s1)
                R[anti_r[0]] = m
                for pair in pairs:
                    for idx in (0, 1):
                        if symplectic_product(pair[idx], m):
                            pair[idx] = product(pair[idx], s1)
    # The replayed pair elements are gauge logicals, defined only modulo
    # the replayed stabilizer group: strip the R component so each masked
    # stabilizer lands in the initial group.  R commutes with every pair
    # element, so the reduction cannot change any commutation pattern,
    # which is asserted below.
    s0_rows = [encode(op) for op in code.s0]
    r_rows = [encode(r) for r in R]
    basis = BitMatrix(r_rows + s0_rows, width)
    P: list[PauliOperator] = []
    K: list[PauliOperator] = []
    for p_op, kappa in pairs:
        combo = in_span(encode(p_op), basis)
        if combo is None:
            raise InternalInvariantError(
                "replayed masked stabilizer is not in the initial group"
            )
        reduced = 0
        for i in combo.indices():
            if i >= len(r_rows):
                reduced ^= s0_rows[i - len(r_rows)]
        stripped = decode(encode(p_op) ^ reduced, code.n)
        for other_p, other_k in pairs:
            if symplectic_product(stripped, other_p) or symplectic_product(
                stripped, other_k
            ):
                raise InternalInvariantError(
                    "replayed stabilizer group does not centralize the pairs"
                )
        P.append(decode(reduced, code.n))
        K.append(kappa)
    return P, K


def _extract_temporarily_masked(
    code: DynamicalCode,
    C: list[TrackedPauli],
    U: list[UnmaskedStabilizer],
    P: list[PauliOperator],
) -> list[PauliOperator]:
    """Surviving associated stabilizers whose syndromes were not revealed."""
    width = 2 * code.n
    k = len(code.s0)
    ech = _Echelon(width)
    for u in U:
        ech.add(encode(u.op), 0)
    T: list[PauliOperator] = []
    for tracked in C:
        s_vec = 0
        for i in range(k):
            if (tracked.assoc.mask >> i) & 1:
                s_vec ^= encode(code.s0[i])
        if s_vec and ech.add(s_vec, 0):
            T.append(decode(s_vec, code.n))
    return T


def _check_partition(code, U, T, P, K) -> None:
    width = 2 * code.n
    rows = [encode(u.op) for u in U] + [encode(t) for t in T] + [encode(p) for p in P]
    if rank(rows, width) != len(rows) or len(rows) != len(code.s0):
        raise InternalInvariantError("U, T, P is not an independent basis of S0")
    basis = BitMatrix(rows, width)
    for op in code.s0:
        if in_span(encode(op), basis) is None:
            raise InternalInvariantError("U, T, P does not span the initial group")
    if len(P) != len(K):
        raise InternalInvariantError("P and K length mismatch")
    members = [u.op for u in U] + list(T) + list(P)
    offset = len(U) + len(T)
    for j, kappa in enumerate(K):
        for i, member in enumerate(members):
            expected = 1 if i == offset + j else 0
            if symplectic_product(kappa, member) != expected:
                raise InternalInvariantError(
                    "destabilizer commutation pattern violated"
                )


@dataclass
class GaugeGroup:
    """Gauge group: stabilizers plus destabilizers for the masked ones."""

    n: int
    generators: list[PauliOperator]
    policy: str
    t_destabs: list[PauliOperator]
    # Per temporarily-masked stabilizer, the logical-coset alternatives
    # available under the exhaustive policy (empty under canonical).
    alternatives: list[list[PauliOperator]] = field(default_factory=list)


def build_gauge_group(
    report: ClassificationReport,
    t_destab_policy: str = "canonical",
    t_destabs: list[PauliOperator] | None = None,
    enumeration_cap: int = 4096,
) -> GaugeGroup:
    """Assemble the gauge group from a classification report.

    Destabilizers for the temporarily masked stabilizers are free; the
    canonical policy solves for the lexicographically least operator
    anticommuting with exactly its target, and the exhaustive policy
    additionally records every coset alternative (target destabilizer
    times any product of bare logicals) so the distance search can
    optimize over them.  Explicit ``t_destabs`` override the solver.
    """
    if t_destab_policy not in ("canonical", "exhaustive"):
        raise ValueError(f"unknown policy {t_destab_policy!r}")
    n = report.n
    width = 2 * n
    stab_ops = [u.op for u in report.U] + list(report.T) + list(report.P)
    if t_destabs is not None and len(t_destabs) != len(report.T):
        raise ValidationError(
            [{"kind": "destabilizer-count-mismatch", "expected": len(report.T)}]
        )
    chosen: list[PauliOperator] = []
    for idx, t_op in enumerate(report.T):
        target = len(report.U) + idx
        if t_destabs is not None:
            kappa = t_destabs[idx]
        else:
            rows = [symplectic_partner(encode(op), n) for op in stab_ops]
            rows += [symplectic_partner(encode(op), n) for op in report.K + chosen]
            rhs = [1 if i == target else 0 for i in range(len(stab_ops))]
            rhs += [0] * (len(report.K) + len(chosen))
            solution = solve_linear(rows, rhs, width)
            if solution is None:
                raise InternalInvariantError("no destabilizer solution exists")
            particular, homogeneous = solution
            kappa = decode(minimize_over_span(particular, homogeneous, width), n)
        for i, op in enumerate(stab_ops):
            expected = 1 if i == target else 0
            if symplectic_product(kappa, op) != expected:
                raise ValidationError(
                    [{"kind": "bad-destabilizer", "index": idx}]
                )
        for other in itertools.chain(report.K, chosen):
            if symplectic_product(kappa, other):
                raise ValidationError(
                    [{"kind": "bad-destabilizer", "index": idx}]
                )
        chosen.append(kappa)
    generators = stab_ops + list(report.K) + chosen
    gauge = GaugeGroup(n, generators, t_destab_policy, chosen)
    if t_destab_policy == "exhaustive" and report.T:
        logicals = _logical_basis(n, generators)
        per_t = 1 << len(logicals)
        if per_t ** len(report.T) > enumeration_cap:
            raise CapExceededError(
                "too many destabilizer cosets to enumerate exhaustively"
            )
        gauge.alternatives = [
            [
                decode(encode(kappa) ^ combo_vec, n)
                for combo_vec in _span_elements([encode(l) for l in logicals])
            ]
            for kappa in chosen
        ]
    return gauge


def _span_elements(rows: list[int]) -> list[int]:
    elements = [0]
    for row in rows:
        elements += [e ^ row for e in elements]
    return elements


def _logical_basis(n: int, generators: list[PauliOperator]) -> list[PauliOperator]:
    """Basis of the normalizer of a group modulo the group itself."""
    rows = [encode(g) for g in generators]
    normalizer = kernel_under_form(BitMatrix(rows, 2 * n))
    ech = _Echelon(2 * n)
    for row in rows:
        ech.add(row, 0)
    basis = []
    for vec in normalizer.rows:
        residue, _ = ech.reduce(vec, 0)
        if residue and ech.add(residue, 0):
            basis.append(decode(residue, n))
    return basis


@dataclass(frozen=True)
class DistanceResult:
    """Result of a minimum-weight search.

    ``value`` is None when the search hit the cap (``exceeded_cap``) or
    when the constrained set is empty (``no_logicals``: every operator
    commuting with the constraints already lies in the excluded group).
    """

    value: int | None
    cap: int
    exceeded_cap: bool = False
    no_logicals: bool = False
    witness: PauliOperator | None = None

    def __str__(self) -> str:
        if self.no_logicals:
            return "undefined"
        if self.exceeded_cap:
            return f"> {self.cap}"
        return str(self.value)


def _min_weight_outside(
    n: int, commute_rows: list[int], exclude_rows: list[int], cap: int
) -> DistanceResult:
    """Minimum weight over operators commuting with all constraint rows
    but outside the excluded span; iterative deepening up to ``cap``."""
    constraints = [symplectic_partner(row, n) for row in commute_rows]
    exclude = _Echelon(2 * n)
    for row in exclude_rows:
        exclude.add(row, 0)
    kernel = kernel_under_form(BitMatrix(commute_rows, 2 * n))
    if all(exclude.reduce(vec, 0)[0] == 0 for vec in kernel.rows):
        return DistanceResult(None, cap, no_logicals=True)
    for w in range(1, cap + 1):
        for support in itertools.combinations(range(n), w):
            for types in itertools.product((1, 2, 3), repeat=w):
                x_mask = z_mask = 0
                for qubit, ty in zip(support, types):
                    if ty & 1:
                        x_mask |= 1 << qubit
                    if ty & 2:
                        z_mask |= 1 << qubit
                vec = x_mask | (z_mask << n)
                if any((vec & c).bit_count() & 1 for c in constraints):
                    continue
                if exclude.reduce(vec, 0)[0]:
                    return DistanceResult(w, cap, witness=decode(vec, n))
    return DistanceResult(None, cap, exceeded_cap=True)


def isg_distance(generators: list[PauliOperator], n: int, cap: int = 6) -> DistanceResult:
    """Distance of a static stabilizer group: lightest normalizer element
    outside the group."""
    rows = [encode(g) for g in generators]
    return _min_weight_outside(n, rows, rows, cap)


def subsystem_distance(gauge: GaugeGroup, cap: int = 6) -> DistanceResult:
    """Lightest dressed logical: commutes with the gauge group's center
    but lies outside the gauge group."""
    rows = [encode(g) for g in gauge.generators]
    center = _group_center(gauge.n, rows)
    return _min_weight_outside(gauge.n, center, rows, cap)


def _group_center(n: int, rows: list[int]) -> list[int]:
    """Basis of the elements of the row span commuting with every row."""
    ech = _Echelon(2 * n)
    basis = [row for row in rows if ech.add(row, 0)]
    # Row j of the pairing matrix records which basis elements anticommute
    # with generator j; combinations in its nullspace form the center.
    pairing = []
    for row in rows:
        partner = symplectic_partner(row, n)
        bits = 0
        for i, vec in enumerate(basis):
            if (vec & partner).bit_count() & 1:
                bits |= 1 << i
        pairing.append(bits)
    center = []
    for combo in nullspace(BitMatrix(pairing, len(basis))):
        vec = 0
        for i in range(len(basis)):
            if (combo >> i) & 1:
                vec ^= basis[i]
        center.append(vec)
    return center


def unmasked_distance(
    report: ClassificationReport, gauge: GaugeGroup, cap: int = 6
) -> DistanceResult:
    """Lightest operator commuting with every unmasked stabilizer but
    outside the gauge group.

    Under the exhaustive destabilizer policy the result is the maximum
    over all recorded destabilizer choices, matching the freedom the
    temporarily masked stabilizers leave open.
    """
    commute = [encode(u.op) for u in report.U]
    if gauge.policy != "exhaustive" or not gauge.alternatives:
        rows = [encode(g) for g in gauge.generators]
        return _min_weight_outside(report.n, commute, rows, cap)
    fixed = [
        encode(g)
        for g in gauge.generators[: len(gauge.generators) - len(gauge.t_destabs)]
    ]
    best: DistanceResult | None = None
    for choice in itertools.product(*gauge.alternatives):
        rows = fixed + [encode(kappa) for kappa in choice]
        result = _min_weight_outside(report.n, commute, rows, cap)
        if result.no_logicals:
            continue
        if result.exceeded_cap:
            return result
        if best is None or (best.value is not None and result.value > best.value):
            best = result
    return best if best is not None else DistanceResult(None, cap, no_logicals=True)
