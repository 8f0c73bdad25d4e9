"""
Configuration for SRIF scoring runs
===================================

Module-level defaults for every run plus the RunConfig record that groups the
per-measure configs. A run config file is plain ``key = value`` text:

    # my_run.conf
    depth = 4
    gamma = 20
    df.level_weights = 0.5, 0.25, 0.25
    sf.bins = 64

Precedence is defaults < config file < command-line flags. The calibration
table path falls back to the SRIF_TABLE environment variable (a ``.env``
file works too).
"""

import hashlib
import logging
import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Dict, Optional, Tuple, Union

from dotenv import dotenv_values, load_dotenv

from fidelity.deterministic import DfConfig
from fidelity.sharpness import LpcConfig
from fidelity.statistical import SfConfig
from utils.errors import ConfigError

logger = logging.getLogger(__name__)

# Pyramid Settings
PYRAMID_DEPTH = 4               # Gaussian levels G_1..G_4, Laplacian L_1..L_3

# Uncertainty Weighting Settings
DEFAULT_ALPHA = 1.0             # exponent of the assorted factor
DEFAULT_GAMMA = 10.0            # S_sim = exp(-gamma * S_raw)
CALIBRATION_BINS = 8            # quantile bins along the assorted factor
MIN_BIN_COUNT = 20              # adjacent bins merge until each holds this many samples

# Performance Settings
DEFAULT_WORKERS = 1             # 1 scores inline, >1 uses a process pool

# Environment
TABLE_ENV_VAR = "SRIF_TABLE"    # calibration table fallback

# Output Settings
REPORT_DECIMALS = 6             # human-readable report precision
TABULAR_FLOAT_FORMAT = "%.17g"  # CSV precision (round-trips float64)
CONFIG_HASH_LENGTH = 16         # hex digits

# Debug and Development
DEBUG_MODE = False              # force DEBUG logging in the CLI


@dataclass(frozen=True)
class RunConfig:
    df: DfConfig = field(default_factory=DfConfig)
    sf: SfConfig = field(default_factory=SfConfig)
    lpc: LpcConfig = field(default_factory=LpcConfig)
    alpha: float = DEFAULT_ALPHA
    gamma: float = DEFAULT_GAMMA
    bins: int = CALIBRATION_BINS
    min_bin_count: int = MIN_BIN_COUNT
    depth: int = PYRAMID_DEPTH
    table_path: Optional[str] = None
    workers: int = DEFAULT_WORKERS

    def __post_init__(self):
        if self.alpha <= 0 or self.gamma <= 0:
            raise ConfigError(f"alpha and gamma must be > 0, got {self.alpha}, {self.gamma}")
        if self.bins < 1 or self.min_bin_count < 1:
            raise ConfigError("bins and min_bin_count must be >= 1")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        needed = max(2, len(self.df.level_weights), len(self.sf.level_weights) + 1)
        if self.depth < needed:
            raise ConfigError(f"depth {self.depth} too shallow: level weights need {needed} Gaussian levels")

    def with_overrides(self, **overrides) -> "RunConfig":
        """Copy with every non-None override applied"""
        changes = {k: v for k, v in overrides.items() if v is not None}
        return replace(self, **changes) if changes else self


# config-file key -> (section, field name, parser)
def _vector(text: str) -> Tuple[float, ...]:
    return tuple(float(v) for v in text.split(",") if v.strip())


CONFIG_KEYS = {
    "depth": (None, "depth", int),
    "alpha": (None, "alpha", float),
    "gamma": (None, "gamma", float),
    "bins": (None, "bins", int),
    "min_bin_count": (None, "min_bin_count", int),
    "workers": (None, "workers", int),
    "table": (None, "table_path", str),
    "df.window": ("df", "window", int),
    "df.sigma": ("df", "sigma", float),
    "df.c1": ("df", "c1", float),
    "df.cw": ("df", "cw", float),
    "df.alphas": ("df", "alphas", _vector),
    "df.level_weights": ("df", "level_weights", _vector),
    "df.clamp_floor": ("df", "clamp_floor", float),
    "sf.norm_window": ("sf", "norm_window", int),
    "sf.c": ("sf", "c", float),
    "sf.bins": ("sf", "bins", int),
    "sf.range": ("sf", "support", float),
    "sf.eps": ("sf", "eps", float),
    "sf.level_weights": ("sf", "level_weights", _vector),
    "lpc.orientations": ("lpc", "orientations", int),
    "lpc.c": ("lpc", "c", float),
    "lpc.beta_k": ("lpc", "beta_k", float),
    "lpc.center_frequency": ("lpc", "center_frequency", float),
    "lpc.sigma_on_f": ("lpc", "sigma_on_f", float),
}


def config_from_mapping(values: Dict[str, Optional[str]], base: Optional[RunConfig] = None) -> RunConfig:
    base = base or RunConfig()
    top, sections = {}, {"df": {}, "sf": {}, "lpc": {}}
    for key, raw in values.items():
        if key not in CONFIG_KEYS:
            raise ConfigError(f"unknown config key '{key}'")
        if raw is None or not str(raw).strip():
            raise ConfigError(f"config key '{key}' has no value")
        section, name, parse = CONFIG_KEYS[key]
        try:
            value = parse(str(raw).strip())
        except ValueError as e:
            raise ConfigError(f"config key '{key}': {e}") from e
        (sections[section] if section else top)[name] = value

    df = replace(base.df, **sections["df"]) if sections["df"] else base.df
    sf = replace(base.sf, **sections["sf"]) if sections["sf"] else base.sf
    lpc = replace(base.lpc, **sections["lpc"]) if sections["lpc"] else base.lpc
    return replace(base, df=df, sf=sf, lpc=lpc, **top)


def load_config(path: Optional[Union[str, Path]] = None, **overrides) -> RunConfig:
    """Defaults, then the config file (if any), then non-None overrides"""
    cfg = RunConfig()
    if path is not None:
        path = Path(path)
        if not path.is_file():
            raise ConfigError(f"config file {path} not found")
        cfg = config_from_mapping(dotenv_values(path), cfg)
        logger.debug(f"Loaded run config from {path}")
    return cfg.with_overrides(**overrides)


def resolve_table_path(cfg: RunConfig) -> Optional[Path]:
    """--table / ``table =`` first, then SRIF_TABLE from the environment or .env"""
    if cfg.table_path:
        return Path(cfg.table_path)
    load_dotenv()
    from_env = os.environ.get(TABLE_ENV_VAR)
    return Path(from_env) if from_env else None


def _canonical(value) -> str:
    if isinstance(value, float):
        return "%.17g" % value
    if isinstance(value, tuple):
        return ",".join(_canonical(v) for v in value)
    return str(value)


def canonical_items(cfg: RunConfig) -> Dict[str, str]:
    """Every numeric setting as sorted ``key -> text``; paths and workers excluded"""
    items = {}
    for section in ("df", "sf", "lpc"):
        sub = getattr(cfg, section)
        for f in fields(sub):
            items[f"{section}.{f.name}"] = _canonical(getattr(sub, f.name))
    for name in ("alpha", "gamma", "bins", "min_bin_count", "depth"):
        items[name] = _canonical(getattr(cfg, name))
    return dict(sorted(items.items()))


def config_hash(cfg: RunConfig, table_digest: Optional[str] = None) -> str:
    lines = [f"{k}={v}" for k, v in canonical_items(cfg).items()]
    lines.append(f"table={table_digest or 'none'}")
    return hashlib.sha256("\n".join(lines).encode("utf-8")).hexdigest()[:CONFIG_HASH_LENGTH]


def format_config(cfg: RunConfig) -> str:
    """Config-file text that loads back to the same numeric settings"""
    reverse = {(section, name): key for key, (section, name, _) in CONFIG_KEYS.items()}
    lines = ["# SRIF run config"]
    for key, value in canonical_items(cfg).items():
        section, _, name = key.rpartition(".")
        file_key = reverse.get((section or None, name))
        if file_key:
            lines.append(f"{file_key} = {value}")
    return "\n".join(lines) + "\n"


def write_config(cfg: RunConfig, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_config(cfg), encoding="utf-8")
    return path
