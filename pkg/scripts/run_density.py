"""Fraction of random potentials lying in U, with a Wilson interval."""

import sys

from _common import config, parser, save
from hamlie.lab import density

if __name__ == "__main__":
    args = parser(__doc__, samples=20000).parse_args()
    sys.exit(save(density(config(args)), args))
