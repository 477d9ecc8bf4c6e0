"""Command-line front end. Results go to stdout (or --output), diagnostics to stderr."""
import functools
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import click

from zforge import __version__
from zforge.analysis import back_forcing_report, bits_label, evaluate, leakage_analysis, truth_table
from zforge.compiler import CompileOptions, CompiledCircuit, apply_inputs, compile_formula
from zforge.errors import (
    ArityMismatch,
    ConfluenceViolation,
    InputError,
    InvalidPartition,
    OracleMismatch,
    ZforgeError,
)
from zforge.export import circuit_to_dot, dump_json, gadget_to_dot
from zforge.forcing import minimum_zero_forcing_set, run_sequential, run_to_fixpoint
from zforge.formula import Mode, evaluate_formula, parse_formula
from zforge.gadgets import FUNCTIONS, GADGETS, search_minimal_gadget, verify_gadget
from zforge.graph import ColoredGraph

logger = logging.getLogger("zforge")

_FILE = click.Path(dir_okay=False, path_type=Path)
_GADGET_FUNCTIONS = {"and": "and", "or": "or", "or3": "or", "copy": "copy", "wire": "identity", "filter": "identity"}


def _reports_errors(command):
    """Turn library errors into a one-line message and the error's exit code."""
    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except ZforgeError as error:
            click.echo(f"zforge: {error}", err=True)
            click.get_current_context().exit(error.exit_code)

    return wrapper


def _read_text(path: Path) -> str:
    try:
        return path.read_text()
    except OSError as error:
        raise InputError(f"cannot read {path}: {error.strerror}") from None


def _read_json(path: Path) -> Dict[str, Any]:
    try:
        return json.loads(_read_text(path))
    except json.JSONDecodeError as error:
        raise InputError(f"{path} is not valid JSON: {error}") from None


def _load_circuit(path: Path) -> CompiledCircuit:
    return CompiledCircuit.from_json_dict(_read_json(path))


def _emit(text: str, output: Optional[Path]) -> None:
    if output is None:
        click.echo(text, nl=False)
    else:
        output.write_text(text)
        logger.info(f"wrote {output}")


def _parse_bits(bits: str, names: List[str]) -> Dict[str, int]:
    bits = bits.strip()
    if len(bits) != len(names) or set(bits) - {"0", "1"}:
        raise ArityMismatch(f"expected {len(names)} bits for inputs {' '.join(names)}, got {bits!r}")
    return {name: int(bit) for name, bit in zip(names, bits)}


def _parse_party(text: str) -> Tuple[str, List[str]]:
    party, sep, names = text.partition("=")
    members = [name.strip() for name in names.split(",") if name.strip()]
    if not sep or not party.strip() or not members:
        raise InvalidPartition(f"party must look like NAME=x1,x2, got {text!r}")
    return party.strip(), members


@click.group()
@click.option("-v", "--verbose", count=True, help="Repeat for more detail on stderr.")
@click.version_option(__version__, prog_name="zforge")
def main(verbose: int):
    """Zero forcing gadgets, circuit compilation and back-forcing analysis."""
    level = logging.WARNING if verbose == 0 else logging.INFO if verbose == 1 else logging.DEBUG
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", force=True)


@main.command("compile")
@click.argument("formula_file", type=_FILE)
@click.option("--mode", type=click.Choice(["monotone", "dual-rail"]), default="monotone", show_default=True)
@click.option("--balance-delays/--no-balance-delays", default=None, help="Defaults to the settings file.")
@click.option("--insert-filters/--no-insert-filters", default=None, help="Defaults to the settings file.")
@click.option("--net-delay", type=click.IntRange(min=0), default=None, help="Delay line length on every gate-to-gate net.")
@click.option("--emit", type=click.Choice(["json", "dot"]), default="json", show_default=True)
@click.option("-o", "--output", type=_FILE, default=None)
@_reports_errors
def compile_command(formula_file, mode, balance_delays, insert_filters, net_delay, emit, output):
    """Compile the formula in FORMULA_FILE into a zero forcing circuit."""
    options = CompileOptions.from_settings(
        balance_delays=balance_delays, insert_filters=insert_filters, net_delay=net_delay
    )
    circuit = compile_formula(_read_text(formula_file), Mode.parse(mode), options)
    _emit(circuit_to_dot(circuit) if emit == "dot" else dump_json(circuit.to_json_dict()), output)


@main.command()
@click.argument("graph_file", type=_FILE)
@click.option("--input", "bits", default=None, help="Input bits in circuit input order, e.g. 0110.")
@click.option("--seed", type=int, default=None, help="Also run a random sequential schedule and compare.")
@click.option("-o", "--output", type=_FILE, default=None)
@_reports_errors
def simulate(graph_file, bits, seed, output):
    """Force a compiled circuit (with --input) or a plain graph to its fixpoint."""
    data = _read_json(graph_file)
    result: Dict[str, Any] = {}
    if "netlist" in data:
        circuit = CompiledCircuit.from_json_dict(data)
        if bits is None:
            raise ArityMismatch(f"--input is required; inputs are {' '.join(circuit.input_names)}")
        assignment = _parse_bits(bits, circuit.input_names)
        evaluation = evaluate(circuit, assignment)
        graph = apply_inputs(circuit, assignment)
        trace = evaluation.trace
        result.update(
            input=bits_label(assignment, circuit.input_names),
            outputs=dict(evaluation.outputs),
            output_steps=dict(evaluation.output_steps),
            expected_output_step=circuit.expected_output_step,
        )
    else:
        if bits is not None:
            raise InputError("--input only applies to compiled circuits")
        graph = ColoredGraph.from_json_dict(data)
        trace = run_to_fixpoint(graph)

    result.update(trace.to_json_dict())
    if seed is not None:
        if run_sequential(graph, seed) != dict(trace.final_coloring):
            raise ConfluenceViolation(f"sequential schedule with seed {seed} reached another coloring")
        result["confluent_with_seed"] = seed
    _emit(dump_json(result), output)


@main.command()
@click.argument("circuit_file", type=_FILE)
@click.option("--check-oracle", is_flag=True, help="Compare every row with direct formula evaluation.")
@click.option("--limit", type=int, default=None, help="Refuse circuits with more inputs than this.")
@click.option("--format", "fmt", type=click.Choice(["json", "text"]), default="json", show_default=True)
@_reports_errors
def table(circuit_file, check_oracle, limit, fmt):
    """Print the truth table of a compiled circuit."""
    circuit = _load_circuit(circuit_file)
    if check_oracle and circuit.formula is None:
        raise InputError("--check-oracle needs a circuit compiled from a formula")

    result = truth_table(circuit, limit)
    click.echo(result.to_text() if fmt == "text" else dump_json(result.model_dump(mode="json")), nl=False)

    if check_oracle:
        ast = parse_formula(circuit.formula, circuit.mode)
        output = circuit.output_names[0]
        for row in result.rows:
            assignment = {name: int(bit) for name, bit in zip(result.inputs, row.input)}
            if row.outputs[output] != evaluate_formula(ast, assignment):
                raise OracleMismatch(f"row {row.input}: circuit says {row.outputs[output]}")
        logger.info(f"all {len(result.rows)} rows agree with the formula")


@main.command()
@click.argument("circuit_file", type=_FILE)
@click.option("--limit", type=int, default=None)
@click.option("--format", "fmt", type=click.Choice(["json", "text"]), default="json", show_default=True)
@_reports_errors
def backforce(circuit_file, limit, fmt):
    """Report backward forces and when every input vertex ends up black."""
    circuit = _load_circuit(circuit_file)
    report = back_forcing_report(circuit, limit)
    if fmt == "json":
        click.echo(dump_json(report.model_dump(mode="json")), nl=False)
        return
    for row in report.assignments:
        marker = "*" if row.inputs_all_black else " "
        click.echo(f"{marker} {row.input} output={row.output} backward={row.backward_events}")
    click.echo(f"all inputs black: {report.condition}")


@main.command()
@click.argument("circuit_file", type=_FILE)
@click.argument("parties", nargs=-1)
@click.option("--parties", "party_options", multiple=True, help="A party spec such as A=x1,x2.")
@click.option("--limit", type=int, default=None)
@_reports_errors
def leakage(circuit_file, parties, party_options, limit):
    """Which parties can infer the output. PARTIES look like A=x1,x2 B=x3,x4."""
    parties = (*party_options, *parties)
    if not parties:
        raise InvalidPartition("no parties given")
    partition = dict(_parse_party(text) for text in parties)
    if len(partition) != len(parties):
        raise InvalidPartition("party names must be distinct")
    circuit = _load_circuit(circuit_file)
    report = leakage_analysis(circuit, partition, limit)
    click.echo(dump_json(report.model_dump(mode="json")), nl=False)


@main.command()
@click.argument("graph_file", type=_FILE)
@click.option("--limit", type=int, default=None, help="Largest graph order to search exhaustively.")
@_reports_errors
def minzfs(graph_file, limit):
    """Find a minimum zero forcing set of the graph in GRAPH_FILE."""
    data = _read_json(graph_file)
    graph = ColoredGraph.from_json_dict(data)
    members = minimum_zero_forcing_set(graph, limit)
    ordered = [v for v in graph.vertices if v in members]
    click.echo(dump_json({"size": len(members), "members": ordered}), nl=False)


@main.command()
@click.argument("name", type=click.Choice(sorted(GADGETS)))
@click.option("--length", type=int, default=1, show_default=True, help="Wire length.")
@click.option("--export", "fmt", type=click.Choice(["json", "dot"]), default="json", show_default=True)
@click.option("--verify", is_flag=True, help="Print the harness truth table instead.")
@_reports_errors
def gadget(name, length, fmt, verify):
    """Print a library gadget."""
    built = GADGETS[name](length) if name == "wire" else GADGETS[name]()
    if verify:
        report = verify_gadget(built, FUNCTIONS[_GADGET_FUNCTIONS[name]])
        payload = report.model_dump(mode="json")
        payload.update(correct=report.correct, propagates=report.propagates, passed=report.passed)
        click.echo(dump_json(payload), nl=False)
    elif fmt == "dot":
        click.echo(gadget_to_dot(built), nl=False)
    else:
        click.echo(dump_json(built.to_json_dict()), nl=False)


@main.command()
@click.argument("function", type=click.Choice(sorted(FUNCTIONS)))
@click.option("--max-vertices", type=int, default=4, show_default=True)
@_reports_errors
def search(function, max_vertices):
    """Enumerate gadgets for FUNCTION on at most --max-vertices vertices."""
    found = search_minimal_gadget(FUNCTIONS[function], max_vertices)
    click.echo(dump_json([g.to_json_dict() for g in found]), nl=False)
