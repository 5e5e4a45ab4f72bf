#!/usr/bin/env python3
"""
Confocal ellipse fitting - command-line entry point
"""

from __future__ import annotations

import logging
import sys
from typing import Optional, Sequence

from src.engine import build_parser, execute

LOG_LEVELS = {0: logging.WARNING, 1: logging.INFO}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Parse arguments, configure logging and run one subcommand."""
    args = build_parser().parse_args(argv)

    # Standard output carries results only
    logging.basicConfig(
        level=LOG_LEVELS.get(args.verbose, logging.DEBUG),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    return execute(args)


if __name__ == "__main__":
    sys.exit(main())
