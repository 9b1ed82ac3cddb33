"""Exhaustive scan of the subspace E: nilpotency and the U / semisimple dichotomy."""

import sys

from _common import config, parser, save
from hamlie.lab import escan

if __name__ == "__main__":
    ap = parser(__doc__)
    ap.add_argument("--max-elements", type=int, default=None)
    args = ap.parse_args()
    sys.exit(save(escan(config(args, max_elements=args.max_elements)), args))
