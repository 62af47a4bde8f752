"""Spectral gap, exact mixing times and the isoperimetric mixing bounds.

All profile integrals are exact sums over step-function pieces. Bounds that
need profiles accept a precomputed `SubsetTable` so one enumeration can feed
several bounds.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .chain_core import MarkovChain, time_reversal
from .enumeration import enumerate_subsets
from .errors import IterationCap, NotLazy, NotReversible
from .isoperimetry import profile

log = logging.getLogger(__name__)

BLOCKING_CONSTANT = 8 * 1376
ITERATION_CAP = 1_000_000
H_VARIANTS = {"plus": "h_plus", "mod": "h_mod", "gl": "h_gl"}


@dataclass(frozen=True)
class SpectralRecord:
    gap: float
    second_eigenvalue: float
    eigenvalues: np.ndarray = field(repr=False)

    def as_dict(self) -> dict:
        return {"lambda": self.gap, "second_eigenvalue": self.second_eigenvalue}


def _require_reversible(chain):
    if not chain.reversible:
        raise NotReversible("operation is defined for reversible chains only")


def spectral_gap(chain: MarkovChain) -> SpectralRecord:
    """Gap 1 - lambda_2 of D^1/2 P D^-1/2 (symmetric for reversible chains)."""
    _require_reversible(chain)
    root = np.sqrt(chain.pi)
    S = root[:, None] * chain.P / root[None, :]
    eig = np.linalg.eigvalsh(0.5 * (S + S.T))
    second = float(eig[-2])
    return SpectralRecord(1.0 - second, second, eig)


def _distances(M, pi, metric):
    if metric == "tv":
        return 0.5 * np.abs(M - pi[None, :]).sum(axis=1)
    return ((M / pi[None, :] - 1.0) ** 2 * pi[None, :]).sum(axis=1)


def exact_mixing(chain: MarkovChain, epsilon: float, metric: str = "tv") -> int:
    """Smallest t with max over point-mass starts of the distance to pi at most epsilon."""
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")
    if metric not in ("tv", "chi2"):
        raise ValueError("metric must be 'tv' or 'chi2'")
    if not chain.lazy:
        log.warning("exact mixing of a non-lazy chain; periodic chains hit the iteration cap")
    M = np.eye(chain.n)
    for t in range(ITERATION_CAP + 1):
        if _distances(M, chain.pi, metric).max() <= epsilon:
            return t
        M = M @ chain.P
    raise IterationCap(f"no mixing within {ITERATION_CAP} steps")


def _table(chain, table, quantities, max_states, threads):
    if table is not None and all(q in table.values for q in quantities):
        return table
    return enumerate_subsets(chain, quantities, max_states=max_states, threads=threads)


def bound_blocking_tau(chain: MarkovChain, h_variant: str = "plus", *, epsilon: float = 0.25,
                       table=None, max_states=None, threads=None) -> float:
    """8*1376 (integral of h over [pi0, 1/2] + h(1/2)), reversible chains only.

    For epsilon < 1/4 the tau(1/4) bound is multiplied by ceil(log2(1/epsilon)).
    """
    _require_reversible(chain)
    name = H_VARIANTS[h_variant]
    base = {"h_plus": "psi_plus", "h_mod": "psi_mod", "h_gl": "psi_gl"}[name]
    table = _table(chain, table, (base,), max_states, threads)
    h = profile(chain, name, table=table)
    value = BLOCKING_CONSTANT * (h.integral(chain.pi0, 0.5) + float(h(0.5)))
    if epsilon < 0.25:
        value *= math.ceil(math.log2(1.0 / epsilon))
    return value


def bound_chi2_evolving(chain: MarkovChain, epsilon: float, *, table=None, max_states=None,
                        threads=None) -> float:
    """Evolving-set bound on chi2(epsilon); valid for non-reversible lazy chains too."""
    table = _table(chain, table, ("psi_evo",), max_states, threads)
    evo = profile(chain, "psi_evo", table=table)
    inv = evo.map(lambda v: 1.0 / v, over_x=True)
    return inv.integral(chain.pi0, 0.5) + math.log(8.0 / epsilon) / float(evo(0.5))


def bound_chi2_spread(chain: MarkovChain, epsilon: float, *, table=None, max_states=None,
                      threads=None):
    """(integral form, flat form) of the reversed-spread bound on chi2(4 eps^2) >= tau(eps)."""
    table = _table(chain, table, ("rev_psi_plus",), max_states, threads)
    spread = profile(chain, "rev_psi_plus", table=table)
    half = float(spread(0.5))
    inv = spread.map(lambda v: 1.0 / v, over_x=True)
    integral_form = 4.0 * inv.integral(chain.pi0, 0.5) + 4.0 * math.log(2.0 / epsilon**2) / half
    flat_form = (2.0 / half) * (math.log(1.0 / chain.pi0) + 2.0 * math.log(1.0 / (2.0 * epsilon)))
    return integral_form, flat_form


def bound_spectral_sandwich(chain: MarkovChain, *, table=None, max_states=None, threads=None):
    """(4 psi_big(1/2), psi+(1/2) / 4, gap) with psi_big(x) taken as an infimum profile."""
    _require_reversible(chain)
    if not chain.lazy:
        raise NotLazy("spectral sandwich needs a lazy chain")
    table = _table(chain, table, ("psi_big", "psi_plus"), max_states, threads)
    big = float(profile(chain, "psi_big", table=table)(0.5))
    plus = float(profile(chain, "psi_plus", table=table)(0.5))
    return 4.0 * big, 0.25 * plus, spectral_gap(chain).gap


def bound_tau_lower(chain: MarkovChain, epsilon: float, *, table=None, max_states=None, threads=None):
    """(psi_big form, spectral-gap form) lower bounds on tau(epsilon); negatives clip to 0."""
    _require_reversible(chain)
    table = _table(chain, table, ("psi_big",), max_states, threads)
    big = float(profile(chain, "psi_big", table=table)(0.5))
    gap = spectral_gap(chain).gap
    big_form = (1.0 - 4.0 * big) / (8.0 * big) * math.log(1.0 / (2.0 * epsilon))
    gap_form = 0.5 * (1.0 - gap) / gap * math.log(1.0 / (2.0 * epsilon))
    return max(0.0, big_form), max(0.0, gap_form)


def pointwise_bound_check(chain: MarkovChain, n_steps: int, m_steps: int):
    """max P^{n+m}(x,z)/pi(z) - 1 against the chi2 norms of P^n(x,.) and reversed P^m(z,.)."""
    if n_steps < 0 or m_steps < 0:
        raise ValueError("step counts must be non-negative")
    pi = chain.pi
    Pn = np.linalg.matrix_power(chain.P, n_steps)
    Rm = np.linalg.matrix_power(time_reversal(chain).P, m_steps)
    ratio = (Pn @ np.linalg.matrix_power(chain.P, m_steps)) / pi[None, :] - 1.0
    x, z = np.unravel_index(int(np.argmax(ratio)), ratio.shape)
    chi_x = _distances(Pn[x:x + 1], pi, "chi2")[0]
    chi_z = _distances(Rm[z:z + 1], pi, "chi2")[0]
    return float(ratio[x, z]), math.sqrt(chi_x) * math.sqrt(chi_z)


@dataclass
class MixingReport:
    epsilon: float
    tau_exact: int
    chi2_exact: int
    bounds: dict
    lower_bounds: dict
    caveats: list

    def to_json(self) -> str:
        payload = {
            "epsilon": self.epsilon,
            "tau_exact": self.tau_exact,
            "chi2_exact": self.chi2_exact,
            "bounds": {k: float(f"{v:.17g}") for k, v in self.bounds.items()},
            "lower_bounds": {k: float(f"{v:.17g}") for k, v in self.lower_bounds.items()},
            "caveats": self.caveats,
        }
        return json.dumps(payload, indent=2, sort_keys=False)

    def violations(self, tau_4eps2_chi2: int | None = None) -> list:
        """Names of bounds that fail against their exact counterparts."""
        bad = []
        for name, value in self.bounds.items():
            exact = self.chi2_exact if name == "chi2_evolving" else self.tau_exact
            if name.startswith("chi2_spread") and tau_4eps2_chi2 is not None:
                exact = tau_4eps2_chi2
            if value < exact:
                bad.append(name)
        for name, value in self.lower_bounds.items():
            if value > self.tau_exact:
                bad.append(name)
        return bad


def mixing_report(chain: MarkovChain, epsilon: float = 0.25, *, table=None, max_states=None,
                  threads=None) -> MixingReport:
    quantities = ("psi_plus", "psi_mod", "psi_gl", "psi_big", "psi_evo", "rev_psi_plus")
    table = _table(chain, table, quantities, max_states, threads)
    bounds = {}
    lower = {}
    caveats = ["discrete-outer-sets"]
    if chain.reversible:
        for variant in H_VARIANTS:
            bounds[f"blocking_{variant}"] = bound_blocking_tau(chain, variant, epsilon=epsilon, table=table)
        caveats.append("blocking bounds use the published constant 8*1376")
    else:
        caveats.append("blocking bounds skipped: chain is not reversible")
    if chain.lazy:
        bounds["chi2_evolving"] = bound_chi2_evolving(chain, epsilon, table=table)
        integral_form, flat_form = bound_chi2_spread(chain, epsilon, table=table)
        bounds["chi2_spread_integral"] = integral_form
        bounds["chi2_spread_flat"] = flat_form
        if chain.reversible:
            psi_form, gap_form = bound_tau_lower(chain, epsilon, table=table)
            lower["psi_big_form"] = psi_form
            lower["gap_form"] = gap_form
    else:
        caveats.append("chi2 and lower bounds skipped: chain is not lazy")
    return MixingReport(
        epsilon=epsilon,
        tau_exact=exact_mixing(chain, epsilon, "tv"),
        chi2_exact=exact_mixing(chain, epsilon, "chi2"),
        bounds=bounds,
        lower_bounds=lower,
        caveats=caveats,
    )
