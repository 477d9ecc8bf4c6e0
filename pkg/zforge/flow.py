"""Prefect flows for the batch experiments: sweep formulas through the compiler and
confirm that every compiled monotone circuit agrees with its formula.
"""
from typing import Dict, List, Optional

from prefect import flow, get_run_logger, task, unmapped

from zforge.analysis import assignments, back_forcing_report, truth_table
from zforge.compiler import CompileOptions, compile_formula
from zforge.formula import Mode, enumerate_formulas, evaluate_formula, parse_formula, to_text


@task()
def check_formula(text: str, options: CompileOptions, mode: Mode = Mode.MONOTONE) -> Dict:
    """ Compile one formula and compare its truth table with direct evaluation """
    circuit = compile_formula(text, mode, options)
    ast = parse_formula(text, mode)
    table = truth_table(circuit)
    expected = [evaluate_formula(ast, a) for a in assignments(circuit.input_names)]
    return {
        "formula": text,
        "vertices": len(circuit.graph),
        "agrees": table.column() == expected,
    }


@task()
def summarize_back_forcing(text: str, options: CompileOptions) -> Dict:
    """ Back-forcing report for one formula, reduced to what a sweep table needs """
    report = back_forcing_report(compile_formula(text, Mode.MONOTONE, options))
    return {
        "formula": text,
        "all_inputs_black": report.all_inputs_black,
        "condition": report.condition,
        "backward_events": sum(row.backward_events for row in report.assignments),
    }


@flow(name="monotone_theorem_flow")
def monotone_theorem_flow(
    max_variables: int = 4,
    max_operators: int = 3,
    insert_filters: bool = False,
) -> List[Dict]:
    logger = get_run_logger()
    formulas = [to_text(ast) for ast in enumerate_formulas(max_variables, max_operators)]
    logger.info(f'Checking {len(formulas)} monotone formulas')

    options = CompileOptions.from_settings(insert_filters=insert_filters)
    results = check_formula.map(formulas, unmapped(options))
    rows = [future.result() for future in results]

    failures = [row["formula"] for row in rows if not row["agrees"]]
    if failures:
        logger.error(f'Compiled circuits disagree with: {failures}')
    else:
        logger.info(f'All {len(rows)} compiled circuits agree with their formulas')
    return rows


@flow(name="zforge_sweep_flow")
def zforge_sweep_flow(
    formulas: Optional[List[str]] = None,
    insert_filters: bool = False,
) -> List[Dict]:
    logger = get_run_logger()
    formulas = formulas or ["(x1 AND x2) OR (x3 AND x4)"]
    options = CompileOptions.from_settings(insert_filters=insert_filters)
    logger.info(f'Sweeping {len(formulas)} formulas with {options}')

    results = summarize_back_forcing.map(formulas, unmapped(options))
    rows = [future.result() for future in results]
    for row in rows:
        logger.info(f'{row["formula"]}: all inputs black {row["condition"]}')
    return rows
