"""Worst-case h2+ on small grids and cubes against the tensorised lower bound."""

import argparse
from dataclasses import dataclass

import numpy as np

from isomix import zoo
from isomix.enumeration import enumerate_subsets
from isomix.gradients import beta_plus, talagrand_bound, tensor_bound


@dataclass
class Config:
    grids: tuple = ((2, 2), (3, 2), (2, 3), (4, 2), (2, 4))
    cubes: tuple = (1, 2, 3, 4)


def worst_ratio(chain, bound):
    tab = enumerate_subsets(chain, ("h2_plus",), max_size=None)
    rhs = np.array([bound(float(s)) for s in tab.size])
    return float((tab["h2_plus"] / rhs).min())


def main(argv=None):
    argparse.ArgumentParser(description=__doc__).parse_args(argv)
    cfg = Config()
    print("path beta+ against 1/(2k):")
    for k in range(2, 9):
        print(f"  k={k}: beta+ = {beta_plus(zoo.lazy_path(k)):.6f}, 1/(2k) = {1 / (2 * k):.6f}")
    print("min over sets of h2+ / bound:")
    for n in cfg.cubes:
        print(f"  cube n={n}: {worst_ratio(zoo.hypercube(n), lambda x, n=n: talagrand_bound(n, x)):.4f}")
    for k, n in cfg.grids:
        component = zoo.lazy_path(k)
        betas = [beta_plus(component)] * n
        ratio = worst_ratio(zoo.grid(k, n), lambda x: tensor_bound([component] * n, x, betas=betas))
        print(f"  grid [{k}]^{n}: {ratio:.4f}")


if __name__ == "__main__":
    main()
