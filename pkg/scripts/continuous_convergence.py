"""Discretised continuous example: convergence of psi+, h1+ and h2+ to their limits."""

import argparse
import math
from dataclasses import dataclass

from isomix import zoo
from isomix.gradients import h_p
from isomix.isoperimetry import spread_plus


@dataclass
class Config:
    eps: float = 0.1
    x: float = 0.5
    grid: tuple = (250, 500, 1000, 2000, 4000)


def limits(eps, x):
    L = math.log(x / eps)
    return {
        "psi_plus": eps**2 / (2 * x**2) * (0.5 + L),
        "h1_plus": eps / (2 * x) * (2 - eps / x),
        "h2_plus": eps / (math.sqrt(2) * x) * (1 + L),
    }


def run(cfg: Config):
    exact = limits(cfg.eps, cfg.x)
    rows = []
    for n in cfg.grid:
        chain, A = zoo.continuous_example(cfg.eps, cfg.x, n)
        got = {"psi_plus": spread_plus(chain, A), "h1_plus": h_p(chain, A, 1).value,
               "h2_plus": h_p(chain, A, 2).value}
        rows.append((n, {k: abs(got[k] - exact[k]) / exact[k] for k in exact}))
    return exact, rows


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--eps", type=float, default=Config.eps)
    parser.add_argument("--x", type=float, default=Config.x)
    parser.add_argument("--grid", type=int, nargs="+", default=list(Config.grid))
    args = parser.parse_args(argv)
    exact, rows = run(Config(args.eps, args.x, tuple(args.grid)))
    print("limits: " + ", ".join(f"{k} = {v:.7f}" for k, v in exact.items()))
    print(f"{'states':>7} " + " ".join(f"{k + ' rel err':>16}" for k in exact))
    for n, errs in rows:
        print(f"{n:>7} " + " ".join(f"{errs[k]:>16.3e}" for k in exact))


if __name__ == "__main__":
    main()
