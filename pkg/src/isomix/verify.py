"""Exhaustive inequality checks over every subset of a chain.

Set-level checks run on the vectorised subset table; chain-level checks
compare spectral and mixing bounds with exact values. A check that does not
apply to the chain (for example laziness-dependent ones) is skipped and
listed in `VerifyReport.skipped`.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .chain_core import MarkovChain
from .enumeration import ALL_QUANTITIES, enumerate_subsets
from .gradients import LOG_CONSTANT
from .spectral_mixing import (
    bound_blocking_tau,
    bound_chi2_evolving,
    bound_chi2_spread,
    bound_spectral_sandwich,
    bound_tau_lower,
    exact_mixing,
)

SLACK = 1e-9
IDENTITY_TOL = 1e-10


@dataclass(frozen=True)
class Violation:
    check: str
    subset: int | None
    lhs: float
    rhs: float

    def as_dict(self) -> dict:
        return {"check": self.check, "subset": self.subset, "lhs": self.lhs, "rhs": self.rhs}


@dataclass
class VerifyReport:
    n: int
    subsets: int
    checks: list = field(default_factory=list)
    skipped: list = field(default_factory=list)
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> str:
        payload = {
            "n": self.n,
            "subsets": self.subsets,
            "checks": self.checks,
            "skipped": self.skipped,
            "violations": [v.as_dict() for v in self.violations],
        }
        return json.dumps(payload, indent=2)


def _sandwich_pieces(t, sign):
    h1, h2, hinf = t[f"h1_{sign}"], t[f"h2_{sign}"], t[f"hinf_{sign}"]
    p_star, p_min = t[f"p_star_{sign}"], t[f"p_min_{sign}"]
    upper = 0.5 * h2 * h2
    ratio = LOG_CONSTANT * h1 * hinf / (h2 * h2)
    lower = np.maximum.reduce([
        upper / np.maximum(1.0, np.log(ratio)),
        upper * np.sqrt(p_min / p_star),
        0.5 * p_min * hinf * hinf,
        0.5 * h1 * h1 / p_star,
    ])
    return 0.5 * h1 * hinf, upper, lower


def set_checks(chain: MarkovChain, table) -> list[tuple[str, np.ndarray, np.ndarray, float]]:
    """(name, lhs, rhs, tol) triples; a check passes where lhs >= rhs - tol.

    Identities appear as two opposite inequalities with the identity tolerance.
    """
    t = table
    out = []

    def identity(name, a, b):
        out.append((name + "[>=]", a, b, IDENTITY_TOL))
        out.append((name + "[<=]", b, a, IDENTITY_TOL))

    out.append(("gl>=mod/2", t["rev_psi_gl"], 0.5 * t["rev_psi_mod"], SLACK))
    out.append(("mod/2>=evo", 0.5 * t["rev_psi_mod"], t["psi_evo"], SLACK))
    identity("psi_big+psi_plus=conductance", t["psi_big"] + t["psi_plus"], t["conductance"])
    identity("martingale", t["martingale"], t["size"])
    if chain.lazy:
        out.append(("evo>=plus/4", t["psi_evo"], 0.25 * t["rev_psi_plus"], SLACK))
        identity("levelset_rewrite", t["psi_plus_levelset"], t["rev_psi_plus"])
    for sign, psi in (("plus", t["psi_plus"]), ("minus", t["psi_minus"])):
        top, upper, lower = _sandwich_pieces(t, sign)
        out.append((f"h1hinf>=h2^2[{sign}]", top, upper, SLACK))
        out.append((f"h2^2/2>=psi[{sign}]", upper, psi, SLACK))
        out.append((f"psi>=lower[{sign}]", psi, lower, SLACK))
    return out


def verify_chain(chain: MarkovChain, *, epsilons=(0.25,), mixing: bool = True,
                 max_states: int | None = None, threads: int | None = None,
                 slack: float = SLACK) -> VerifyReport:
    table = enumerate_subsets(chain, ALL_QUANTITIES, max_states=max_states, threads=threads)
    report = VerifyReport(chain.n, len(table))
    if not chain.lazy:
        report.skipped += ["evo>=plus/4", "levelset_rewrite", "spectral_sandwich", "chi2 bounds"]
    for name, lhs, rhs, tol in set_checks(chain, table):
        report.checks.append(name)
        tol = max(tol, slack) if tol == SLACK else tol
        bad = np.flatnonzero(~(lhs >= rhs - tol))
        for i in bad:
            report.violations.append(Violation(name, int(table.ids[i]), float(lhs[i]), float(rhs[i])))

    def chain_check(name, lhs, rhs):
        report.checks.append(name)
        if not lhs >= rhs - slack:
            report.violations.append(Violation(name, None, float(lhs), float(rhs)))

    if chain.reversible and chain.lazy:
        upper, lower, gap = bound_spectral_sandwich(chain, table=table)
        chain_check("4psi_big>=gap", upper, gap)
        chain_check("gap>=psi_plus/4", gap, lower)
    if not mixing:
        return report
    for eps in epsilons:
        tau = exact_mixing(chain, eps, "tv")
        if chain.reversible:
            for variant in ("plus", "mod", "gl"):
                chain_check(f"blocking_{variant}>=tau({eps})",
                            bound_blocking_tau(chain, variant, epsilon=eps, table=table), tau)
        else:
            report.skipped.append("blocking bounds")
        if chain.lazy:
            chi = exact_mixing(chain, eps, "chi2")
            chi_sq = exact_mixing(chain, 4 * eps * eps, "chi2") if 4 * eps * eps < 1 else 0
            chain_check(f"chi2_evolving>=chi2({eps})", bound_chi2_evolving(chain, eps, table=table), chi)
            integral_form, flat_form = bound_chi2_spread(chain, eps, table=table)
            chain_check(f"chi2_spread_integral>=chi2(4eps^2)[{eps}]", integral_form, chi_sq)
            chain_check(f"chi2_spread_flat>=chi2(4eps^2)[{eps}]", flat_form, chi_sq)
            chain_check(f"chi2(4eps^2)>=tau({eps})", chi_sq, tau)
            if chain.reversible:
                psi_form, gap_form = bound_tau_lower(chain, eps, table=table)
                chain_check(f"tau({eps})>=psi_big_form", tau, psi_form)
                chain_check(f"tau({eps})>=gap_form", tau, gap_form)
    return report
