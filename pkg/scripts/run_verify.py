"""Run identity batteries; all of them by default.

    python scripts/run_verify.py --suite lemma31,lift --samples 50
"""

import sys

from _common import config, parser, save
from hamlie.lab import BATTERIES, verify_suite

if __name__ == "__main__":
    ap = parser(__doc__, samples=20)
    ap.add_argument("--suite", default="", help=f"comma separated from: {', '.join(BATTERIES)}")
    args = ap.parse_args()
    names = [s for s in args.suite.split(",") if s] or list(BATTERIES)
    sys.exit(save(verify_suite(names, config(args)), args))
