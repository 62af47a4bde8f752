"""Discrete p-gradients, the gradient sandwiches on the spread, and product-chain bounds."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np
from scipy.special import ndtri

from .chain_core import MarkovChain, SetLike, proper_set
from .enumeration import enumerate_subsets
from .errors import DomainError, NoBoundaryEdge, TooBig
from .isoperimetry import spread_minus, spread_plus

INF = math.inf
LOG_CONSTANT = 12.0


@dataclass(frozen=True)
class GradientRecord:
    p: float
    sign: str
    value: float
    q_flow: float
    denominator: float


@dataclass(frozen=True)
class SandwichReport:
    upper: float
    lower_log: float
    lower_sqrt: float
    lower_alon: float
    lower_js: float
    psi: float
    p_star: float
    p_min: float
    p_min_normalized: float
    upper_h1_hinf: float
    sign: str
    degenerate_log: bool
    discrete_outer_sets: bool = True

    @property
    def lower(self) -> float:
        return max(self.lower_log, self.lower_sqrt, self.lower_alon, self.lower_js)

    def holds(self, slack: float = 1e-9) -> bool:
        return self.upper_h1_hinf >= self.upper - slack and self.upper >= self.psi - slack \
            and self.psi >= self.lower - slack

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


def _sides(chain, S, sign):
    mask = S.mask
    if sign == "plus":
        src, dst = mask, ~mask
    elif sign == "minus":
        src, dst = ~mask, mask
    else:
        raise ValueError(f"sign must be 'plus' or 'minus', got {sign!r}")
    return src, dst


def _q_p(chain, src, dst, p):
    rates = chain.P[:, dst].sum(axis=1)[src]
    w = chain.pi[src]
    if p == INF:
        return float(w[rates > 0].sum())
    return float(np.sum(w * rates ** (1.0 / p)))


def h_p(chain: MarkovChain, A: SetLike, p: float, sign: str = "plus") -> GradientRecord:
    """h_p^+(A) = Q_p(A, A^c) / min(pi(A), pi(A^c)); minus uses Q_p(A^c, A)."""
    if p not in (1, 2, INF):
        raise ValueError("p must be 1, 2 or infinity")
    S = proper_set(chain, A)
    src, dst = _sides(chain, S, sign)
    q = _q_p(chain, src, dst, p)
    denom = min(S.measure, 1.0 - S.measure)
    return GradientRecord(p, sign, q / denom, q, denom)


def exit_constants(chain: MarkovChain, A: SetLike):
    """(P_*, P_min, P_min normalised by pi(v)) for transitions out of A.

    P_min is the smallest positive P(u, v) with u in A, v outside; the
    normalised variant divides each by pi(v) and is reported only.
    """
    S = proper_set(chain, A)
    mask = S.mask
    block = chain.P[np.ix_(mask, ~mask)]
    positive = block > 0
    if not positive.any():
        raise NoBoundaryEdge("no positive transition leaves the set")
    p_star = float(block.sum(axis=1).max())
    p_min = float(block[positive].min())
    normalised = block / chain.pi[~mask][None, :]
    return p_star, p_min, float(normalised[positive].min())


def sandwich(chain: MarkovChain, A: SetLike, sign: str = "plus") -> SandwichReport:
    S = proper_set(chain, A)
    if S.measure > 0.5 + 1e-12:
        raise TooBig(f"pi(A) = {S.measure} exceeds 1/2")
    side = S if sign == "plus" else S.complement(chain)
    p_star, p_min, p_min_norm = exit_constants(chain, side)
    h1 = h_p(chain, S, 1, sign).value
    h2 = h_p(chain, S, 2, sign).value
    hinf = h_p(chain, S, INF, sign).value
    psi = spread_plus(chain, S) if sign == "plus" else spread_minus(chain, S)
    upper = 0.5 * h2 * h2
    ratio = LOG_CONSTANT * h1 * hinf / (h2 * h2)
    degenerate = ratio <= math.e
    return SandwichReport(
        upper=upper,
        lower_log=upper / max(1.0, math.log(ratio)),
        lower_sqrt=upper * math.sqrt(p_min / p_star),
        lower_alon=0.5 * p_min * hinf * hinf,
        lower_js=0.5 * h1 * h1 / p_star,
        psi=psi,
        p_star=p_star,
        p_min=p_min,
        p_min_normalized=p_min_norm,
        upper_h1_hinf=0.5 * h1 * hinf,
        sign=sign,
        degenerate_log=degenerate,
    )


def gaussian_iso(x: float) -> float:
    """Gaussian isoperimetric function: standard normal density at the x-quantile."""
    if not 0.0 <= x <= 1.0 or math.isnan(x):
        raise DomainError(f"x = {x} outside [0, 1]")
    if x == 0.0 or x == 1.0:
        return 0.0
    z = float(ndtri(x))
    return math.exp(-0.5 * z * z) / math.sqrt(2.0 * math.pi)


def beta_plus(chain: MarkovChain, max_states: int | None = None, threads: int | None = None) -> float:
    """sqrt of inf over proper A of Q(A, A^c)^2 / (pi(A) pi(A^c)), by exhaustive enumeration."""
    table = enumerate_subsets(chain, ("flow",), max_size=None, max_states=max_states, threads=threads)
    x = table.size
    ratio = table["flow"] ** 2 / (x * (1.0 - x))
    return math.sqrt(float(ratio.min()))


def _log_term(x):
    if not 0.0 < x < 1.0:
        raise DomainError(f"x = {x} outside (0, 1)")
    return -math.log(x * (1.0 - x))


def talagrand_bound(n: int, x: float) -> float:
    if n < 1:
        raise DomainError("n must be >= 1")
    return 0.25 * math.sqrt(_log_term(x) / n)


def tensor_bound(components: Sequence[MarkovChain], x: float, betas: Sequence[float] | None = None,
                 max_states: int | None = None) -> float:
    """Lower bound on h2+ of the Cartesian product at size x from component beta+ values."""
    term = _log_term(x)
    if betas is None:
        betas = [beta_plus(c, max_states=max_states) for c in components]
    return 0.5 * min(betas) * math.sqrt(term / len(components))
