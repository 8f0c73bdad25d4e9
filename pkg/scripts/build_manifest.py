#!/usr/bin/env python3
"""
Manifest MOS Filler
===================

IQA databases publish their subjective scores as plain text, usually one
``<image name> <score>`` pair per line. This script copies a template
manifest and fills its ``mos`` column by matching each row's test image file
name against that score file.

Rows without a score are kept with a blank MOS and reported.

Usage:
    python scripts/build_manifest.py manifests/template.csv scores.txt --out manifests/qads.csv
"""

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path
from typing import Dict

# Add project root to path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from datasets.manifest import parse_manifest, write_manifest
from utils.errors import ParseError, SrifError

logger = logging.getLogger("build_manifest")


def read_scores(path: Path) -> Dict[str, float]:
    """``name score`` per line (whitespace or comma separated); ``#`` starts a comment"""
    scores = {}
    for number, line in enumerate(path.read_text(encoding="utf-8-sig").splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.replace(",", " ").split()
        if len(fields) < 2:
            raise ParseError(f"expected '<image name> <score>', got '{line}'", number)
        try:
            scores[Path(fields[0]).name] = float(fields[-1])
        except ValueError:
            raise ParseError(f"score '{fields[-1]}' is not a number", number)
    return scores


def fill_manifest(template: Path, scores_path: Path, out: Path) -> Path:
    scores = read_scores(scores_path)
    entries, missing = [], 0
    for entry in parse_manifest(template):
        mos = scores.get(Path(entry.test_path).name)
        if mos is None:
            missing += 1
            logger.warning(f"No score for {entry.test_path.name} (line {entry.line_number})")
        entries.append(replace(entry, mos=mos))
    logger.info(f"📋 Filled {len(entries) - missing} of {len(entries)} MOS values")
    return write_manifest(entries, out, comment=f"MOS from {scores_path.name}")


def main(argv=None) -> int:
    """Main function for command-line execution"""
    parser = argparse.ArgumentParser(description="Fill a manifest's MOS column from a published score file")
    parser.add_argument("template", type=Path, help="Template manifest (paths only)")
    parser.add_argument("scores", type=Path, help="Score file: '<image name> <score>' per line")
    parser.add_argument("--out", type=Path, required=True, help="Output manifest")
    args = parser.parse_args(argv)

    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(levelname)s %(name)s: %(message)s", stream=sys.stderr)

    try:
        fill_manifest(args.template, args.scores, args.out)
    except SrifError as e:
        sys.stderr.write(f"{type(e).__name__}: {e}\n")
        return e.exit_code
    except OSError as e:
        sys.stderr.write(f"DecodeError: {e}\n")
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
