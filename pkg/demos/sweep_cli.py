"""
Driving a sweep from Python
===========================

The same grid the command line reads from a config file, built inline and
written as CSV. From a shell: ``python -m shofa --config configs/sim2.cfg``.
"""

import sys

from shofa.harness import parse_config, sweep, write_csv

grid = parse_config("""
codec = exact
mode = combined
n = 1000
k = 20
trials = 50
sweep m 24 48 4
""")
write_csv(sweep(grid), sys.stdout)
