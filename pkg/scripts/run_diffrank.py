"""Rank of the differential of xi at random points of V.

    python scripts/run_diffrank.py --r 2 --m 3 --samples 25
"""

import sys

from _common import config, parser, save
from hamlie.lab import diff_rank

if __name__ == "__main__":
    args = parser(__doc__, samples=25).parse_args()
    sys.exit(save(diff_rank(config(args)), args))
