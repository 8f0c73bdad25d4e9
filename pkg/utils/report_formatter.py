# report_formatter.py
"""
Text and CSV formatting for SRIF results
"""

from pathlib import Path
from typing import Dict, Iterable, Mapping, Union

import pandas as pd

DECIMALS = 6


class ReportFormatter:
    def __init__(self, decimals: int = DECIMALS):
        self.decimals = decimals

    def format_value(self, value):
        """Fixed-decimal text for floats, str() for everything else"""
        if isinstance(value, float):
            return f"{value:.{self.decimals}f}"
        return str(value)

    def format_record(self, record: Mapping[str, object]) -> str:
        """``key = value`` lines"""
        return "\n".join(f"{k} = {self.format_value(v)}" for k, v in record.items()) + "\n"

    def format_fidelity(self, values: Dict[str, float], warnings: Iterable[str], config_hash: str) -> str:
        lines = self.format_record(values)
        for warning in warnings:
            lines += f"# warning: {warning}\n"
        return lines + f"config_hash = {config_hash}\n"

    def format_evaluation(self, record: Mapping[str, object], mode: str, config_hash: str) -> str:
        body = {"mode": mode}
        body.update(record)
        body["config_hash"] = config_hash
        return self.format_record(body)

    def format_ablation(self, records: Mapping[str, Mapping[str, object]], config_hash: str) -> str:
        """One row per scoring mode"""
        frame = pd.DataFrame.from_dict(records, orient="index")
        frame.index.name = "mode"
        text = frame.to_string(float_format=lambda v: f"{v:.{self.decimals}f}")
        return f"{text}\nconfig_hash = {config_hash}\n"

    def format_grouped(self, records: Mapping[str, Mapping[str, Mapping[str, object]]], by: str, config_hash: str) -> str:
        """One row per (group, scoring mode)"""
        rows = []
        for group, per_mode in records.items():
            rows.extend({by: group, "mode": mode, **record} for mode, record in per_mode.items())
        frame = pd.DataFrame(rows).set_index([by, "mode"])
        text = frame.to_string(float_format=lambda v: f"{v:.{self.decimals}f}")
        return f"{text}\nconfig_hash = {config_hash}\n"


def write_hashed_csv(frame: pd.DataFrame, path: Union[str, Path], config_hash: str,
                     float_format: str = "%.17g") -> Path:
    """CSV whose first line is ``# config_hash=<hash>``"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write(f"# config_hash={config_hash}\n")
        frame.to_csv(handle, index=False, float_format=float_format, lineterminator="\n")
    return path


def read_hashed_csv(path: Union[str, Path]) -> pd.DataFrame:
    return pd.read_csv(path, skiprows=1)
