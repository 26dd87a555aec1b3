"""
Command-line interface: validate, classify, distance, floquet, simulate.

Reports are JSON documents with sorted keys, so output is byte-identical
across runs for a fixed input and seed.  Every number in a report is
wrapped with a provenance marker.  Exit codes: 0 ok, 1 validation
failure, 2 cap exceeded, 3 internal invariant violation.
"""

from __future__ import annotations

import hashlib
import json
import random
import sys
from importlib import metadata

import click

from .classify import (
    build_gauge_group,
    isg_distance,
    run_classification,
    subsystem_distance,
    unmasked_distance,
)
from .engine import (
    CapExceededError,
    DynamicalCode,
    InternalInvariantError,
    ISGState,
    LogicalMeasurementError,
    ValidationError,
    measure,
    validate_code,
)
from .errors import SpacetimeError, syndrome_of_spacetime_error, verify_round0_decoding
from .floquet import (
    growth_accounting,
    check_subset_monotonicity,
    initialization_depth,
    iterate_cycles,
    unmask_cycle_count,
)
from .library import load_code
from .pauli import format_pauli, parse_pauli

SCHEMA_VERSION = 1


def _tool_version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "unknown"


def _computed(value):
    return {"value": value, "provenance": "computed"}


def _digest(path: str) -> str:
    with open(path, "rb") as handle:
        return hashlib.sha256(handle.read()).hexdigest()


def _emit(report: dict, fmt: str) -> None:
    if fmt == "json":
        click.echo(json.dumps(report, indent=2, sort_keys=True))
    else:
        _emit_text(report)


def _emit_text(node, prefix: str = "") -> None:
    if isinstance(node, dict):
        if set(node) == {"value", "provenance"}:
            click.echo(f"{prefix}: {node['value']}")
            return
        for key in sorted(node):
            _emit_text(node[key], f"{prefix}.{key}" if prefix else key)
    elif isinstance(node, list):
        for i, item in enumerate(node):
            _emit_text(item, f"{prefix}[{i}]")
    else:
        click.echo(f"{prefix}: {node}")


def _report_shell(command: str, path: str) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "tool_version": _tool_version(),
        "command": command,
        "input_digest": _digest(path),
    }


def _run(command):
    """Execute a command body, mapping exceptions to exit codes."""
    try:
        command()
    except ValidationError as exc:
        click.echo(json.dumps({"error": "validation", "diagnostics":
                               exc.diagnostics}, sort_keys=True), err=True)
        sys.exit(1)
    except (CapExceededError, LogicalMeasurementError) as exc:
        click.echo(json.dumps({"error": "cap-exceeded", "message": str(exc)},
                              sort_keys=True), err=True)
        sys.exit(2)
    except InternalInvariantError as exc:
        click.echo(json.dumps({"error": "internal-invariant", "message":
                               str(exc)}, sort_keys=True), err=True)
        sys.exit(3)


def _shift_code(code: DynamicalCode, isg_round: int) -> DynamicalCode:
    """Replace s0 by the ISG reached after ``isg_round`` rounds."""
    if isg_round <= 0:
        return code
    state = ISGState.initial(code)
    for rnd in code.rounds[:isg_round]:
        for m in rnd:
            state, _ = measure(state, m)
    return DynamicalCode.make(
        code.n, state.generators, code.rounds[isg_round:], labels=code.labels
    )


def _expr_to_json(expr) -> dict:
    return {
        "sign": -1 if expr.sign else 1,
        "symbols": sorted(
            [[s.kind, s.index] for s in expr.symbols]
        ),
    }


def _distance_to_json(result) -> dict:
    if result.no_logicals:
        return {"status": "no-logicals"}
    if result.exceeded_cap:
        return {"status": "exceeded-cap", "cap": _computed(result.cap)}
    payload = {"status": "ok", "value": _computed(result.value)}
    if result.witness is not None:
        payload["witness"] = format_pauli(result.witness)
    return payload


@click.group()
def main():
    """Analyze measurement-defined stabilizer codes."""


@main.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--format", "fmt", type=click.Choice(["json", "text"]),
              default="json", show_default=True)
def validate(file, fmt):
    """Check a code file structurally; exit 0 iff clean."""

    def body():
        code = load_code(file)
        report = _report_shell("validate", file)
        report["diagnostics"] = validate_code(code)
        report["n"] = _computed(code.n)
        report["rounds"] = _computed(len(code.rounds))
        _emit(report, fmt)

    _run(body)


@main.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--window", type=int, default=None,
              help="Rounds to classify over (default: all).")
@click.option("--isg-round", type=int, default=0, show_default=True,
              help="Classify the ISG reached after this many rounds.")
@click.option("--format", "fmt", type=click.Choice(["json", "text"]),
              default="json", show_default=True)
def classify(file, window, isg_round, fmt):
    """Partition the initial stabilizers into unmasked / temporarily
    masked / permanently masked, with syndrome formulas and destabilizers."""

    def body():
        code = _shift_code(load_code(file), isg_round)
        result = run_classification(code, window=window)
        report = _report_shell("classify", file)
        report["window"] = _computed(result.window)
        report["unmasked"] = [
            {
                "operator": format_pauli(u.op),
                "syndrome": _expr_to_json(u.syndrome),
            }
            for u in result.U
        ]
        report["temporarily_masked"] = [format_pauli(t) for t in result.T]
        report["permanently_masked"] = [
            {"operator": format_pauli(p), "destabilizer": format_pauli(k)}
            for p, k in zip(result.P, result.K)
        ]
        report["generator_tags"] = list(result.tags)
        _emit(report, fmt)

    _run(body)


@main.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--window", type=int, default=None)
@click.option("--cap", type=int, default=6, show_default=True,
              help="Maximum weight searched before giving up.")
@click.option("--t-destab", type=click.Choice(["canonical", "exhaustive"]),
              default="canonical", show_default=True)
@click.option("--format", "fmt", type=click.Choice(["json", "text"]),
              default="json", show_default=True)
def distance(file, window, cap, t_destab, fmt):
    """Compute the unmasked, subsystem, and ISG distances."""

    def body():
        code = load_code(file)
        result = run_classification(code, window=window)
        gauge = build_gauge_group(result, t_destab_policy=t_destab)
        report = _report_shell("distance", file)
        report["d_u"] = _distance_to_json(
            unmasked_distance(result, gauge, cap=cap)
        )
        report["d_subsystem"] = _distance_to_json(
            subsystem_distance(gauge, cap=cap)
        )
        report["d_isg"] = _distance_to_json(
            isg_distance(list(code.s0), code.n, cap=cap)
        )
        report["t_destab_policy"] = t_destab
        _emit(report, fmt)

    _run(body)


@main.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--max-cycles", type=int, default=0,
              help="Cycle cap (default: qubit count + 2).")
@click.option("--format", "fmt", type=click.Choice(["json", "text"]),
              default="json", show_default=True)
def floquet(file, max_cycles, fmt):
    """Cycle analysis: initialization depth, monotonicity, growth, unmasking."""

    def body():
        code = load_code(file)
        sequence = [m for rnd in code.rounds for m in rnd]
        trace = iterate_cycles(sequence, code.n, max_cycles=max_cycles)
        accounting = growth_accounting(trace)
        report = _report_shell("floquet", file)
        report["initialization_depth"] = _computed(initialization_depth(trace))
        report["monotonicity_violations"] = check_subset_monotonicity(trace)
        report["growth_deltas"] = [_computed(d) for d in accounting["deltas"]]
        report["growth_violations"] = accounting["violations"]
        report["unmask_cycles"] = _computed(unmask_cycle_count(code))
        _emit(report, fmt)

    _run(body)


def parse_error_spec(spec: str, n: int) -> dict:
    """Parse comma-separated "round:pauli" error placements."""
    errors = {}
    if not spec:
        return errors
    for part in spec.split(","):
        if ":" not in part:
            raise ValidationError(
                [{"kind": "bad-error-spec", "part": part}]
            )
        round_text, pauli_text = part.split(":", 1)
        try:
            round_index = int(round_text)
        except ValueError:
            raise ValidationError(
                [{"kind": "bad-error-spec", "part": part}]
            ) from None
        errors[round_index] = parse_pauli(pauli_text.strip(), n)
    return errors


@main.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--errors", "error_spec", default="",
              help='Error placements, e.g. "0:X1,2:Z6Z7".')
@click.option("--seed", type=int, default=0, show_default=True,
              help="Seed for the sampled outcome assignment.")
@click.option("--max-weight", type=int, default=1, show_default=True,
              help="Weight bound for the decodability check.")
@click.option("--format", "fmt", type=click.Choice(["json", "text"]),
              default="json", show_default=True)
def simulate(file, error_spec, seed, max_weight, fmt):
    """Inject spacetime errors: syndromes and a decodability verdict."""

    def body():
        code = load_code(file)
        placed = parse_error_spec(error_spec, code.n)
        bad = [r for r in placed if r > len(code.rounds)]
        if bad:
            raise ValidationError(
                [{"kind": "round-out-of-range", "round": r} for r in bad]
            )
        error = SpacetimeError.make(code.n, placed)
        result = run_classification(code)
        gauge = build_gauge_group(result)
        rng = random.Random(seed & 0xFFFFFFFFFFFFFFFF)
        report = _report_shell("simulate", file)
        report["seed"] = _computed(seed)
        report["errors"] = {
            str(r): format_pauli(op) for r, op in error.by_round
        }
        syndromes = []
        for u in result.U:
            decomposition = _syndrome_decomposition(code, u)
            bit = syndrome_of_spacetime_error(error, decomposition, u.op)
            syndromes.append(
                {"stabilizer": format_pauli(u.op), "flip": _computed(bit)}
            )
        report["syndromes"] = syndromes
        verdict = verify_round0_decoding(
            code, result, gauge, max_weight,
            unmasked_d=None,
        )
        report["decoding"] = {
            "ok": verdict.ok,
            "errors_checked": _computed(verdict.errors_checked),
            "max_weight": _computed(verdict.max_weight),
        }
        if verdict.violation is not None:
            report["decoding"]["violation"] = [
                format_pauli(op) for op in verdict.violation
            ]
        report["logical_outcomes"] = _logical_outcomes(code, error, rng)
        _emit(report, fmt)

    _run(body)


def _logical_outcomes(code: DynamicalCode, error, rng) -> list[dict]:
    """Evaluate each tracked logical two ways under one sampled outcome set.

    The formula value comes from the closed-form spacetime product; the
    simulated value from evaluating the symbolic forward simulation under
    the same (seeded) assignment of all unknown bits.  They must agree.
    """
    from .engine import canonical_logicals, simulate_measurements
    from .engine import OutcomeSymbol, RANDOM_BIT
    from .errors import build_logical_trace, logical_outcome

    placed = dict(error.by_round)
    state, record = simulate_measurements(
        code, errors=placed, track_logicals=True
    )
    symbols = {s for _, _, expr in record for s in expr.symbols}
    if state.logicals:
        for _, expr in state.logicals:
            symbols |= expr.symbols
    assignment = {
        s: rng.choice((1, -1))
        for s in sorted(symbols, key=lambda s: (s.kind, s.index))
    }
    initial_values = {
        s.index: v for s, v in assignment.items()
        if s.kind == "initial-stabilizer"
    }
    measurement_values = {
        t: expr.evaluate(assignment) for t, _, expr in record
    }
    results = []
    logical_ops = [op for op, _ in canonical_logicals(code.n, list(code.s0))]
    for i, op in enumerate(logical_ops):
        entry = {"logical": format_pauli(op)}
        try:
            trace = build_logical_trace(code, op)
        except ValidationError:
            entry["status"] = "measured-out"
            results.append(entry)
            continue
        l0_value = assignment.get(OutcomeSymbol(RANDOM_BIT, i), 1)
        formula = logical_outcome(
            trace, error, l0_value, initial_values, measurement_values
        )
        entry["status"] = "ok"
        entry["formula_value"] = _computed(formula)
        # Positional matching with the simulation only holds when no
        # tracked logical was measured out along the way.
        if state.logicals is not None and len(state.logicals) == len(logical_ops):
            simulated = state.logicals[i][1].evaluate(assignment)
            entry["simulated_value"] = _computed(simulated)
            entry["agree"] = formula == simulated
        results.append(entry)
    return results


def _syndrome_decomposition(code: DynamicalCode, unmasked_entry) -> dict:
    """Per-round operator products entering an unmasked syndrome formula."""
    from .pauli import identity, product

    occurrence_round = {}
    occurrence_op = {}
    for t, (r, m) in enumerate(code.measurements()):
        occurrence_round[t] = r
        occurrence_op[t] = m
    decomposition: dict[int, object] = {}
    for symbol in unmasked_entry.syndrome.symbols:
        r = occurrence_round[symbol.index]
        op = decomposition.get(r, identity(code.n))
        decomposition[r] = product(op, occurrence_op[symbol.index])
    return decomposition
