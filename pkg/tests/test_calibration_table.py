import numpy as np
import pytest

from fidelity.calibration_table import format_table, parse_table, read_table, table_digest, write_table
from fidelity.uncertainty import calibrate
from utils.errors import TableFormatError


@pytest.fixture
def table():
    rng = np.random.default_rng(21)
    n = 160
    quality = rng.uniform(0, 1, n)
    samples = np.column_stack([
        quality + rng.normal(0, 0.03, n),
        quality + rng.normal(0, 0.05, n),
        rng.uniform(0.5, 2.5, n),
        100 * quality,
    ])
    return calibrate(samples, bins=4, min_bin_count=20, alpha=2.0, gamma=5.0,
                     config_hash="0123456789abcdef", dataset="unit test")


def test_written_table_reads_back_identically(table, tmp_path):
    path = write_table(table, tmp_path / "tables" / "unit.table")
    loaded = read_table(path)
    assert loaded.bins == table.bins
    assert (loaded.alpha, loaded.gamma, loaded.config_hash) == (2.0, 5.0, "0123456789abcdef")
    assert loaded.dataset == "unit_test"


def test_header_carries_version_and_settings(table):
    header = format_table(table).splitlines()[0]
    assert header.startswith("SRIF_TABLE version=1 alpha=2 gamma=5 config_hash=0123456789abcdef")


def test_digest_is_stable(table):
    assert table_digest(table) == table_digest(parse_table(format_table(table)))
    assert len(table_digest(table)) == 16


@pytest.mark.parametrize("text", [
    "",
    "NOT_A_TABLE version=1\n",
    "SRIF_TABLE version=2 alpha=1 gamma=10\n0 1 1 1 0.5 0.5 20 0\n",
    "SRIF_TABLE version=1 alpha=1 gamma=10\n0 1 1 1 0.5 0.5 20\n",
    "SRIF_TABLE version=1 alpha=1 gamma=10\n0 1 1 1 0.7 0.7 20 0\n",
    "SRIF_TABLE version=1 alpha=1 gamma=10\n",
])
def test_malformed_tables_are_rejected(text):
    with pytest.raises(TableFormatError):
        parse_table(text)


def test_missing_file_is_a_table_error(tmp_path):
    with pytest.raises(TableFormatError):
        read_table(tmp_path / "absent.table")
