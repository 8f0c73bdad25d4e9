#!/usr/bin/env python3
"""
Synthetic Dataset Generator
===========================

Writes textured reference images, degraded test images (blur, noise,
bicubic down/up) and a labeled manifest with a synthetic MOS. Handy for
trying the tool end to end without a licensed IQA database.

Usage:
    python scripts/make_synthetic_dataset.py data/synthetic [--images=20] [--size=128] [--seed=0]
"""

import argparse
import logging
import sys
from pathlib import Path

# Add project root to path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from datasets.synthetic import write_dataset

logger = logging.getLogger("make_synthetic_dataset")


def main(argv=None) -> int:
    """Main function for command-line execution"""
    parser = argparse.ArgumentParser(description="Generate a synthetic SR fidelity dataset")
    parser.add_argument("out_dir", help="Output directory")
    parser.add_argument("--images", type=int, default=20, help="Number of reference images (default: 20)")
    parser.add_argument("--size", type=int, default=128, help="Image side in pixels (default: 128)")
    parser.add_argument("--seed", type=int, default=0, help="Random seed (default: 0)")
    args = parser.parse_args(argv)

    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(levelname)s %(name)s: %(message)s", stream=sys.stderr)

    manifest = write_dataset(args.out_dir, n_images=args.images, size=args.size, seed=args.seed)
    logger.info(f"✅ Manifest ready: {manifest}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
