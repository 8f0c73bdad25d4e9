#!/usr/bin/env python3
"""
SRIF command-line tool
======================

Scores super-resolved images against their high-resolution references, calibrates the
uncertainty weights on a labeled dataset and evaluates agreement with MOS.

Subcommands:
- score      one (reference, test) pair, report on stdout
- batch      every pair of a manifest, CSV out
- calibrate  build a calibration table from the train split of a labeled manifest
- evaluate   SRCC / KRCC / PLCC / RMSE per scoring mode (srif, df_only, sf_only, avg, all),
             optionally per SR algorithm, scale or category
- plot-2d    (D, S_sim) scatter per SR algorithm

Exit codes: 0 ok, 1 unexpected error, 2 bad input, 3 image dimensions, 4 not enough / degenerate data,
5 other scoring error.

Usage:
    python scripts/srif.py score ref.png sr.png --table tables/qads.table
    python scripts/srif.py batch manifests/qads.csv --out results.csv --workers 4
    python scripts/srif.py calibrate manifests/qads.csv --out tables/qads.table --plot
    python scripts/srif.py evaluate manifests/qads.csv --mode all --split test
    python scripts/srif.py evaluate manifests/qads.csv --mode all --by algorithm --plot out/qads_pred
    python scripts/srif.py plot-2d manifests/qads.csv --out out/qads_2d --svg
"""

import argparse
import logging
import sys
from pathlib import Path

# Add project root to path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from datasets.loader import load_pair
from datasets.manifest import ManifestEntry, filter_split, parse_manifest
from pipeline.batch_processor import BatchProcessor
from pipeline.calibrator import Calibrator
from pipeline.config import DEBUG_MODE, REPORT_DECIMALS, load_config
from pipeline.evaluator import GROUP_KEYS, MODES, Evaluator, prediction_frame, read_categories
from pipeline.scorer import FidelityScorer
from reporting.plots import scatter_frame, write_prediction_plot, write_scatter
from utils.errors import ConfigError, SrifError
from utils.report_formatter import ReportFormatter

logger = logging.getLogger("srif")

# fixed averaging against uncertainty weighting
PREDICTION_PLOT_MODES = ("avg", "srif")


class SrifCommandLine:
    def __init__(self, args: argparse.Namespace):
        """Resolve the run config: defaults < --config file < flags"""
        self.args = args
        self.cfg = load_config(
            args.config,
            alpha=getattr(args, "alpha", None),
            gamma=getattr(args, "gamma", None),
            bins=getattr(args, "bins", None),
            workers=getattr(args, "workers", None),
            table_path=getattr(args, "table", None),
        )
        self.formatter = ReportFormatter(REPORT_DECIMALS)

    def _entries(self, split: str = "all"):
        return filter_split(parse_manifest(self.args.manifest), split)

    def _emit(self, text: str):
        """Results go to --out when given, stdout otherwise"""
        out = getattr(self.args, "out", None)
        if out:
            Path(out).parent.mkdir(parents=True, exist_ok=True)
            Path(out).write_text(text, encoding="utf-8")
            logger.info(f"💾 Wrote {out}")
        else:
            sys.stdout.write(text)

    def score(self) -> int:
        scorer = FidelityScorer.from_config(self.cfg)
        entry = ManifestEntry(ref_path=Path(self.args.reference), test_path=Path(self.args.test))
        pair = load_pair(entry)
        report = scorer.score(pair.reference, pair.test)
        self._emit(self.formatter.format_fidelity(report.values(), report.warnings, report.config_hash))
        return 0

    def batch(self) -> int:
        scorer = FidelityScorer.from_config(self.cfg)
        result = BatchProcessor(scorer, self.cfg.workers).run(self._entries())
        if self.args.out:
            result.write_csv(self.args.out)
            logger.info(f"💾 Wrote {len(result.scored)} rows to {self.args.out}")
        else:
            sys.stdout.write(f"# config_hash={result.config_hash}\n")
            result.frame().to_csv(sys.stdout, index=False, float_format="%.17g", lineterminator="\n")
        return 0

    def calibrate(self) -> int:
        calibrator = Calibrator(
            self.cfg,
            search_weights=self.args.search_level_weights,
            fixed_alpha=self.args.alpha,
            fixed_gamma=self.args.gamma,
            dataset=self.args.dataset or Path(self.args.manifest).stem,
        )
        outcome = calibrator.run(parse_manifest(self.args.manifest))
        for path in outcome.write(self.args.out, plot=self.args.plot):
            logger.info(f"💾 Wrote {path}")
        summary = {
            "samples": outcome.n_samples,
            "bins": len(outcome.table.bins),
            "alpha": outcome.table.alpha,
            "gamma": outcome.table.gamma,
            "srcc": outcome.srcc,
        }
        sys.stdout.write(self.formatter.format_record({**summary, "config_hash": outcome.config_hash}))
        return 0

    def evaluate(self) -> int:
        scorer = FidelityScorer.from_config(self.cfg)
        modes = MODES if self.args.mode == "all" else (self.args.mode,)
        categories = None
        if self.args.by == "category":
            if not self.args.categories:
                raise ConfigError("--by category needs --categories")
            categories = read_categories(self.args.categories)

        evaluator = Evaluator(scorer, self.cfg.workers)
        frame = evaluator.score(self._entries(self.args.split))
        reports = {}
        if self.args.by:
            groups = evaluator.evaluate_groups(frame, modes, self.args.by, categories)
            records = {g: {m: r.as_record() for m, r in per_mode.items()} for g, per_mode in groups.items()}
            text = self.formatter.format_grouped(records, self.args.by, scorer.config_hash)
        else:
            reports = evaluator.evaluate_frame(frame, modes)
            if len(modes) == 1:
                text = self.formatter.format_evaluation(reports[modes[0]].as_record(), modes[0], scorer.config_hash)
            else:
                text = self.formatter.format_ablation({m: r.as_record() for m, r in reports.items()}, scorer.config_hash)
        self._emit(text)

        if self.args.plot:
            plot_modes = tuple(dict.fromkeys(PREDICTION_PLOT_MODES + tuple(modes)))
            missing = [m for m in plot_modes if m not in reports]
            reports.update(evaluator.evaluate_frame(frame, missing))
            predictions = prediction_frame(frame, {m: reports[m] for m in plot_modes})
            for path in write_prediction_plot(predictions, self.args.plot, scorer.config_hash):
                logger.info(f"💾 Wrote {path}")
        return 0

    def plot_2d(self) -> int:
        scorer = FidelityScorer.from_config(self.cfg)
        result = BatchProcessor(scorer, self.cfg.workers).run(self._entries())
        if not result.scored:
            logger.error("❌ No pair could be scored, nothing to plot")
            return 4
        write_scatter(scatter_frame(result.frame()), self.args.out, result.config_hash, svg=self.args.svg)
        return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Super-resolution image fidelity (SRIF) toolkit")
    parser.add_argument("--verbose", action="store_true", help="Enable debug logging")
    parser.add_argument("--config", help="Run config file (key = value lines)")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, table=True, workers=True):
        if table:
            p.add_argument("--table", help="Calibration table (default: $SRIF_TABLE)")
        if workers:
            p.add_argument("--workers", type=int, help="Worker processes (default: 1)")
        p.add_argument("--alpha", type=float, help="Assorted-factor exponent")
        p.add_argument("--gamma", type=float, help="S_sim = exp(-gamma * S_raw) scale")

    p = sub.add_parser("score", help="Score one reference/test pair")
    p.add_argument("reference")
    p.add_argument("test")
    p.add_argument("--out", help="Write the report here instead of stdout")
    common(p, workers=False)

    p = sub.add_parser("batch", help="Score every pair of a manifest")
    p.add_argument("manifest")
    p.add_argument("--out", help="Output CSV (default: stdout)")
    common(p)

    p = sub.add_parser("calibrate", help="Build a calibration table from the train split")
    p.add_argument("manifest")
    p.add_argument("--out", required=True, help="Table path; the weight curve goes next to it")
    p.add_argument("--bins", type=int, help="Quantile bins along f (default: 8)")
    p.add_argument("--dataset", help="Dataset id stored in the table (default: manifest name)")
    p.add_argument("--search-level-weights", action="store_true", help="Grid-search DF level weights by SRCC")
    p.add_argument("--plot", action="store_true", help="Also write the weight curve as HTML")
    common(p, table=False)

    p = sub.add_parser("evaluate", help="Correlation with MOS per scoring mode")
    p.add_argument("manifest")
    p.add_argument("--mode", choices=MODES + ("all",), default="srif")
    p.add_argument("--split", choices=("all", "train", "test"), default="all")
    p.add_argument("--by", choices=GROUP_KEYS, help="One report per SR algorithm, scale factor or category")
    p.add_argument("--categories", help="algorithm = category lines, for --by category")
    p.add_argument("--plot", help="Output base path for the MOS vs prediction scatter (.csv, .html)")
    p.add_argument("--out", help="Write the report here instead of stdout")
    common(p)

    p = sub.add_parser("plot-2d", help="(D, S_sim) scatter per SR algorithm")
    p.add_argument("manifest")
    p.add_argument("--out", required=True, help="Output base path (.csv, _centroids.csv, .html, .svg)")
    p.add_argument("--svg", action="store_true", help="Also export SVG (needs kaleido)")
    common(p)
    return parser


def main(argv=None) -> int:
    """Main function for command-line execution"""
    parser = build_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=logging.DEBUG if (args.verbose or DEBUG_MODE) else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )

    actions = {
        "score": SrifCommandLine.score,
        "batch": SrifCommandLine.batch,
        "calibrate": SrifCommandLine.calibrate,
        "evaluate": SrifCommandLine.evaluate,
        "plot-2d": SrifCommandLine.plot_2d,
    }
    try:
        cli = SrifCommandLine(args)
        return actions[args.command](cli)
    except SrifError as e:
        sys.stderr.write(f"{type(e).__name__}: {e}\n")
        return e.exit_code
    except Exception as e:
        logger.exception(f"❌ Fatal error: {e}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
