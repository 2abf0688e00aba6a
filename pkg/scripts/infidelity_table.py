#!/usr/bin/env python3
"""Print the reference infidelity table at extended precision.

Equivalent to `compulse --digits 60 table`; kept as a script so the
experiment is one command with no flags to remember.
"""

import sys

from compulse.cli import main

if __name__ == "__main__":
    sys.exit(main(["--digits", "60", "table"] + sys.argv[1:]))
