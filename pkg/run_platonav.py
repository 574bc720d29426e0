#!/usr/bin/env python
"""
Runner script for platonav experiments.

    python run_platonav.py run --config configs/forest_laser.pbtxt --out runs/forest
"""

import logging
import sys
import warnings
warnings.filterwarnings("ignore", module="google.protobuf.runtime_version")

logger = logging.getLogger("PlatoNav")

src_path = "src"
if src_path not in sys.path:
    sys.path.insert(0, src_path)

try:
    from platonav.cli import main
except ImportError as e:
    logging.basicConfig(level=logging.INFO)
    logger.error(f"Import error: {e}")
    logger.error("Make sure you've installed the package with: pip install -e .")
    sys.exit(1)

if __name__ == "__main__":
    main()
