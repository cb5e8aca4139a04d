#!/usr/bin/env python3
"""Print the degenerate-eigenbasis demonstration report.

Equivalent to `proddecomp demo`; kept as a script entry point for quick
experimentation.
"""

import sys

from proddecomp.cli import main

if __name__ == "__main__":
    sys.exit(main(["demo"] + sys.argv[1:]))
