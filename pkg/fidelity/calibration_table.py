"""
Plain-text calibration table format
===================================

    SRIF_TABLE version=1 alpha=1 gamma=10 config_hash=3f0c... dataset=qads
    # lo hi v_d v_s w_d w_s count degenerate
    0.12 0.87 0.0031 0.0102 0.767... 0.232... 25 0
    ...

Floats are written with 17 significant digits so a read-back table is
bit-identical to the one written.
"""

import hashlib
import logging
import re
from pathlib import Path
from typing import Union

from fidelity.uncertainty import TABLE_VERSION, CalibrationBin, CalibrationTable
from utils.errors import SrifError, TableFormatError

logger = logging.getLogger(__name__)

MAGIC = "SRIF_TABLE"
COLUMNS = "# lo hi v_d v_s w_d w_s count degenerate"


def _g(value: float) -> str:
    return "%.17g" % value


def _token(text: str) -> str:
    return re.sub(r"\s+", "_", text.strip()) or "unknown"


def format_table(table: CalibrationTable) -> str:
    header = (
        f"{MAGIC} version={table.version} alpha={_g(table.alpha)} gamma={_g(table.gamma)} "
        f"config_hash={_token(table.config_hash)} dataset={_token(table.dataset)}"
    )
    lines = [header, COLUMNS]
    for b in table.bins:
        lines.append(" ".join([
            _g(b.lo), _g(b.hi), _g(b.v_d), _g(b.v_s), _g(b.w_d), _g(b.w_s),
            str(b.count), "1" if b.degenerate else "0",
        ]))
    return "\n".join(lines) + "\n"


def parse_table(text: str) -> CalibrationTable:
    lines = text.splitlines()
    if not lines or not lines[0].startswith(MAGIC + " "):
        raise TableFormatError(f"line 1: missing '{MAGIC}' header")

    meta = {}
    for item in lines[0].split()[1:]:
        key, sep, value = item.partition("=")
        if not sep:
            raise TableFormatError(f"line 1: malformed header field '{item}'")
        meta[key] = value
    try:
        version = int(meta["version"])
        alpha = float(meta["alpha"])
        gamma = float(meta["gamma"])
    except (KeyError, ValueError) as e:
        raise TableFormatError(f"line 1: bad header ({e})") from e
    if version != TABLE_VERSION:
        raise TableFormatError(f"line 1: unsupported table version {version}")

    bins = []
    for number, line in enumerate(lines[1:], start=2):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if len(fields) != 8:
            raise TableFormatError(f"line {number}: expected 8 fields, got {len(fields)}")
        try:
            lo, hi, v_d, v_s, w_d, w_s = (float(v) for v in fields[:6])
            count, degenerate = int(fields[6]), fields[7] == "1"
        except ValueError as e:
            raise TableFormatError(f"line {number}: {e}") from e
        bins.append(CalibrationBin(lo, hi, v_d, v_s, w_d, w_s, count, degenerate))

    try:
        return CalibrationTable(
            bins=tuple(bins), alpha=alpha, gamma=gamma,
            config_hash=meta.get("config_hash", "none"), dataset=meta.get("dataset", "unknown"),
            version=version,
        )
    except SrifError as e:
        raise TableFormatError(str(e)) from e


def write_table(table: CalibrationTable, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_table(table), encoding="utf-8")
    logger.info(f"Wrote calibration table ({len(table.bins)} bins) to {path}")
    return path


def read_table(path: Union[str, Path]) -> CalibrationTable:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise TableFormatError(f"cannot read calibration table {path}: {e}") from e
    return parse_table(text)


def table_digest(table: CalibrationTable) -> str:
    """First 16 hex digits of the SHA-256 of the serialized table"""
    return hashlib.sha256(format_table(table).encode("utf-8")).hexdigest()[:16]
