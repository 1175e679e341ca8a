#!/usr/bin/env python3
"""Run the reach-bounds command line from a source checkout."""

import logging
import sys
from pathlib import Path

LOGGER = logging.getLogger("reach_bounds.runner")
ROOT_DIR = Path(__file__).resolve().parent
SRC_DIR = ROOT_DIR / "src"

if str(SRC_DIR) not in sys.path:
    sys.path.insert(0, str(SRC_DIR))


def main() -> None:
    """Delegate to the console entry point and exit with its status."""
    from reach_bounds.cli import main as cli_main

    try:
        status = cli_main()
    except KeyboardInterrupt:  # pragma: no cover - interactive use only
        LOGGER.info("reach-bounds stopped by user request")
        status = 1
    except Exception as exc:  # pragma: no cover - unexpected failures
        logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s %(message)s")
        LOGGER.exception("reach-bounds failed: %s", exc)
        status = 1
    sys.exit(status)


if __name__ == "__main__":
    main()
