"""
Dataset manifests
=================

CSV with header ``ref_path,test_path,mos,algorithm,scale,split``. Lines
starting with ``#`` are comments. Relative paths resolve against the
manifest's directory. ``mos`` may be blank for unlabeled pairs; blank
``scale`` means 1 and blank ``split`` means ``all``.

Usage:
    from datasets.manifest import parse_manifest, filter_split

    entries = parse_manifest("manifests/qads.csv")
    train = filter_split(entries, "train")
"""

import csv
import io
import logging
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, List, Optional, Union

from utils.errors import ParseError

logger = logging.getLogger(__name__)

MANIFEST_COLUMNS = ("ref_path", "test_path", "mos", "algorithm", "scale", "split")
SPLITS = ("train", "test", "all")


@dataclass(frozen=True)
class ManifestEntry:
    ref_path: Path
    test_path: Path
    mos: Optional[float] = None
    algorithm: str = ""
    scale: int = 1
    split: str = "all"
    line_number: int = 0
    duplicate: bool = False

    def __post_init__(self):
        if not str(self.ref_path) or not str(self.test_path):
            raise ParseError("ref_path and test_path must be non-empty", self.line_number)
        if self.mos is not None and not math.isfinite(self.mos):
            raise ParseError(f"mos must be finite, got {self.mos}", self.line_number)
        if self.scale < 1:
            raise ParseError(f"scale must be >= 1, got {self.scale}", self.line_number)
        if self.split not in SPLITS:
            raise ParseError(f"split must be one of {SPLITS}, got '{self.split}'", self.line_number)

    @property
    def labeled(self) -> bool:
        return self.mos is not None


def _records(text: str):
    """(first line number, fields) per CSV record; blank and comment lines outside quotes are skipped"""
    numbers = []

    def content():
        quoted = False
        for number, line in enumerate(text.splitlines(keepends=True), start=1):
            stripped = line.strip()
            if not quoted and (not stripped or stripped.startswith("#")):
                continue
            numbers.append(number)
            yield line
            if line.count('"') % 2:
                quoted = not quoted

    reader = csv.reader(content())
    consumed = 0
    try:
        for fields in reader:
            yield numbers[consumed], fields
            consumed = reader.line_num
    except csv.Error as e:
        raise ParseError(f"malformed CSV: {e}", numbers[consumed] if consumed < len(numbers) else 0)


def _resolve(raw: str, base: Path) -> Path:
    path = Path(raw.strip())
    return path if path.is_absolute() else base / path


def _parse_row(fields: List[str], number: int, base: Path) -> ManifestEntry:
    if len(fields) != len(MANIFEST_COLUMNS):
        raise ParseError(f"expected {len(MANIFEST_COLUMNS)} fields, got {len(fields)}", number)
    ref, test, mos, algorithm, scale, split = (f.strip() for f in fields)
    if not ref or not test:
        raise ParseError("ref_path and test_path must be non-empty", number)
    try:
        mos_value = float(mos) if mos else None
    except ValueError:
        raise ParseError(f"mos '{mos}' is not a number", number)
    try:
        scale_value = int(scale) if scale else 1
    except ValueError:
        raise ParseError(f"scale '{scale}' is not an integer", number)
    return ManifestEntry(
        ref_path=_resolve(ref, base),
        test_path=_resolve(test, base),
        mos=mos_value,
        algorithm=algorithm,
        scale=scale_value,
        split=split or "all",
        line_number=number,
    )


def parse_manifest(path: Union[str, Path]) -> List[ManifestEntry]:
    """Entries in file order; duplicate (ref, test) pairs are kept and flagged"""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8-sig")
    except OSError as e:
        raise ParseError(f"cannot read manifest {path}: {e}")

    records = list(_records(text))
    if not records:
        raise ParseError(f"manifest {path} has no header")
    header_number, header = records[0]
    columns = tuple(c.strip() for c in header)
    if columns != MANIFEST_COLUMNS:
        raise ParseError(f"header must be {','.join(MANIFEST_COLUMNS)}", header_number)

    base = path.parent
    entries, seen = [], set()
    for number, fields in records[1:]:
        entry = _parse_row(fields, number, base)
        key = (entry.ref_path, entry.test_path)
        if key in seen:
            logger.warning(f"Duplicate pair on line {number}: {entry.ref_path} / {entry.test_path}")
            entry = replace(entry, duplicate=True)
        seen.add(key)
        entries.append(entry)

    logger.debug(f"Parsed {len(entries)} entries from {path}")
    return entries


def filter_split(entries: Iterable[ManifestEntry], split: str) -> List[ManifestEntry]:
    """Entries of one split; rows marked ``all`` belong to every split"""
    if split not in SPLITS:
        raise ParseError(f"split must be one of {SPLITS}, got '{split}'")
    if split == "all":
        return list(entries)
    return [e for e in entries if e.split in (split, "all")]


def write_manifest(entries: Iterable[ManifestEntry], path: Union[str, Path], comment: str = "") -> Path:
    """Write entries with paths relative to the manifest directory where possible"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    base = path.parent.resolve()

    def rel(p: Path) -> str:
        try:
            return Path(p).resolve().relative_to(base).as_posix()
        except ValueError:
            return str(p)

    buffer = io.StringIO()
    if comment:
        for line in comment.splitlines():
            buffer.write(f"# {line}\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(MANIFEST_COLUMNS)
    for e in entries:
        mos = "" if e.mos is None else "%.17g" % e.mos
        writer.writerow([rel(e.ref_path), rel(e.test_path), mos, e.algorithm, e.scale, e.split])
    path.write_text(buffer.getvalue(), encoding="utf-8")
    return path
