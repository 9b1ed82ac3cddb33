"""Restrict xi to the torus, interpolate, and compare with Dickson invariants."""

import sys

from _common import config, parser, save
from hamlie.lab import torus_restrict

if __name__ == "__main__":
    ap = parser(__doc__)
    ap.add_argument("--n-glr", type=int, default=50)
    args = ap.parse_args()
    if args.m == 1 and "--m" not in sys.argv:
        args.m = args.r + 1
    sys.exit(save(torus_restrict(config(args), n_glr=args.n_glr), args))
