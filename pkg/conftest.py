import pytest

from zforge.compiler import CompileOptions, compile_formula
from zforge.formula import Mode

TWO_AND_OR = "(x1 AND x2) OR (x3 AND x4)"


@pytest.fixture(scope="session")
def two_and_or():
    return compile_formula(TWO_AND_OR, Mode.MONOTONE, CompileOptions(balance_delays=True, insert_filters=False))


@pytest.fixture(scope="session")
def two_and_or_filtered():
    return compile_formula(TWO_AND_OR, Mode.MONOTONE, CompileOptions(balance_delays=True, insert_filters=True))


@pytest.fixture(scope="session")
def prefect_harness():
    from prefect.testing.utilities import prefect_test_harness

    with prefect_test_harness():
        yield
