"""Barbells: exact mixing time against 1/psi+(1/2), the spectral gap and the sandwich."""

import argparse
from dataclasses import dataclass

from isomix import zoo
from isomix.isoperimetry import profile
from isomix.spectral_mixing import bound_spectral_sandwich, exact_mixing


@dataclass
class Config:
    sizes: tuple = (3, 4, 5, 6, 8, 10)
    epsilon: float = 0.25


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", type=int, nargs="+", default=list(Config.sizes))
    args = parser.parse_args(argv)
    cfg = Config(tuple(args.sizes))
    print(f"{'m':>3} {'tau':>6} {'1/psi+(1/2)':>12} {'1/lambda':>10} {'4 psi_big':>10} {'psi+/4':>10}")
    for m in cfg.sizes:
        chain = zoo.barbell(m)
        tau = exact_mixing(chain, cfg.epsilon)
        inv = 1 / float(profile(chain, "psi_plus")(0.5))
        upper, lower, gap = bound_spectral_sandwich(chain)
        print(f"{m:>3} {tau:>6} {inv:>12.1f} {1 / gap:>10.2f} {upper:>10.4g} {lower:>10.4g}")


if __name__ == "__main__":
    main()
