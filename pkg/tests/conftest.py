import pytest

from eigencoprime.forms import generated_table, load_bundled
from eigencoprime.qseries import level1_eigenform
from eigencoprime.stats import FormPairDataset


@pytest.fixture(scope="session")
def bundled():
    return {name: load_bundled(name) for name in ("f1", "f2", "f3")}


@pytest.fixture(scope="session")
def pair12(bundled):
    return FormPairDataset(bundled["f1"], bundled["f2"])


@pytest.fixture(scope="session")
def level1_series():
    """Expansions of the weight 12 and 16 eigenforms through q^10000."""
    return {k: level1_eigenform(k, 10_001).series for k in (12, 16)}


@pytest.fixture(scope="session")
def gen_pair():
    """(Delta, Delta * E4) with prime data to 10^4."""
    return FormPairDataset(generated_table(12, 10_000), generated_table(16, 10_000))


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
