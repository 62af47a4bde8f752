"""Set functionals: flow profiles, spreads, evolving-set quantity, conductance, profiles.

Single-set functions work directly from the sorted-exit-probability
construction of the minimal (or maximal) flow out of a fractional subset.
`profile` enumerates subsets through `enumeration` and turns the per-subset
values into exact step functions of the set size.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass

import numpy as np

from .chain_core import LINALG_TOL, MarkovChain, SetLike, proper_set, time_reversal
from .enumeration import enumerate_subsets
from .errors import NotLazy
from .functions import PiecewiseLinear, StepFunction

log = logging.getLogger(__name__)

SIZE_DECIMALS = 12


@dataclass(frozen=True)
class SpreadRecord:
    psi_plus: float
    psi_minus: float
    psi_gl: float
    psi_mod: float
    psi_evo: float
    psi_big: float
    conductance: float
    reversed: bool = False

    def as_dict(self) -> dict:
        return asdict(self)


def _exit_probs(chain, mask):
    return chain.P[:, ~mask].sum(axis=1), chain.P[:, mask].sum(axis=1)


def _ordered(idx, rates, descending):
    # stable sort keeps index order among ties
    key = -rates[idx] if descending else rates[idx]
    return idx[np.argsort(key, kind="stable")]


def _half_profile(pi, idx, rates, descending):
    """Knots (s, flow) of the cumulative flow when `idx` is taken in sorted order."""
    order = _ordered(idx, rates, descending)
    s = np.concatenate([[0.0], np.cumsum(pi[order])])
    f = np.concatenate([[0.0], np.cumsum(pi[order] * rates[order])])
    return s, f


def flow_profile(chain: MarkovChain, A: SetLike, mode: str = "infimum") -> PiecewiseLinear:
    """t -> Psi(t, A^c) (mode="infimum") or Psi_big(t, A^c) (mode="supremum") on [0, 1]."""
    if mode not in ("infimum", "supremum"):
        raise ValueError(f"mode must be 'infimum' or 'supremum', got {mode!r}")
    S = proper_set(chain, A)
    mask = S.mask
    exit_, entry = _exit_probs(chain, mask)
    descending = mode == "supremum"
    inside = np.flatnonzero(mask)
    outside = np.flatnonzero(~mask)
    t_in, f_in = _half_profile(chain.pi, inside, exit_, descending)
    s_out, f_out = _half_profile(chain.pi, outside, entry, descending)
    x = t_in[-1]
    # t > pi(A) is the complement's profile read backwards from t = 1
    t_out = (1.0 - s_out[::-1])[1:]
    t_out[-1] = 1.0
    v_out = f_out[::-1][1:]
    ts = np.concatenate([t_in, t_out])
    vs = np.concatenate([f_in, v_out])
    vs[-1] = 0.0
    return PiecewiseLinear(ts, vs)


def _closed_form_spread(chain, mask, descending):
    """pi(A)^2 * psi via the sum of rate * (mass before * pi(v) + pi(v)^2 / 2)."""
    exit_, _ = _exit_probs(chain, mask)
    order = _ordered(np.flatnonzero(mask), exit_, descending)
    w = chain.pi[order]
    before = np.cumsum(w) - w
    x = w.sum()
    return float(np.sum(exit_[order] * (before * w + 0.5 * w * w)) / x**2)


def spread_plus(chain: MarkovChain, A: SetLike) -> float:
    """psi+(A): minimal-flow profile integrated over [0, pi(A)], normalised by pi(A)^2."""
    S = proper_set(chain, A)
    return _closed_form_spread(chain, S.mask, descending=True)


def spread_minus(chain: MarkovChain, A: SetLike) -> float:
    S = proper_set(chain, A)
    x = S.measure
    return flow_profile(chain, S).integral(x, 1.0) / x**2


def spread_gl(chain: MarkovChain, A: SetLike) -> float:
    return spread_plus(chain, A) + spread_minus(chain, A)


def spread_mod(chain: MarkovChain, A: SetLike) -> float:
    S = proper_set(chain, A)
    return flow_profile(chain, S).integral_over_tsharp() / S.measure


def psi_big(chain: MarkovChain, A: SetLike) -> float:
    """Same closed form as psi+ with the maximal-flow (ascending exit) order."""
    S = proper_set(chain, A)
    return _closed_form_spread(chain, S.mask, descending=False)


def conductance(chain: MarkovChain, A: SetLike) -> float:
    S = proper_set(chain, A)
    exit_, _ = _exit_probs(chain, S.mask)
    return float(chain.pi[S.mask] @ exit_[S.mask]) / S.measure


def level_set_profile(chain: MarkovChain, A: SetLike) -> StepFunction:
    """u -> pi(A_u) with A_u = {y : reversed P(y, A) > u}, on [0, 1)."""
    S = proper_set(chain, A)
    rev = time_reversal(chain)
    back = rev.P[:, S.mask].sum(axis=1)
    cuts = np.unique(np.concatenate([[0.0], back[(back > 0) & (back < 1)], [1.0]]))
    values = np.array([chain.pi[back > u].sum() for u in cuts])
    values[-1] = 0.0
    return StepFunction(cuts, values)


def _require_lazy(chain):
    if not chain.lazy:
        raise NotLazy("operation needs a lazy chain (all holding probabilities >= 1/2)")


def psi_evo(chain: MarkovChain, A: SetLike) -> float:
    S = proper_set(chain, A)
    if not chain.lazy:
        log.warning("psi_evo on a non-lazy chain")
    prof = level_set_profile(chain, S)
    b, v = prof.breakpoints, prof.values
    return 1.0 - float(np.sum(np.diff(b) * np.sqrt(v[:-1] / S.measure)))


def psi_plus_via_levelsets(chain: MarkovChain, A: SetLike) -> float:
    """1/2 * integral over [1/2, 1] of ((pi(A) - pi(A_u)) / pi(A))^2 du."""
    _require_lazy(chain)
    S = proper_set(chain, A)
    prof = level_set_profile(chain, S)
    b, v = prof.breakpoints, prof.values
    lo = np.maximum(b[:-1], 0.5)
    length = np.maximum(0.0, b[1:] - lo)
    return 0.5 * float(np.sum(length * ((S.measure - v[:-1]) / S.measure) ** 2))


def lemma_flow_identity(chain: MarkovChain, A: SetLike, t: float):
    """Reversed-chain minimal flow at t versus its level-set integral; returns (lhs, rhs)."""
    _require_lazy(chain)
    if not 0.0 < t < 1.0:
        raise ValueError("t must lie in (0, 1)")
    S = proper_set(chain, A)
    lhs = float(flow_profile(time_reversal(chain), S)(t))
    prof = level_set_profile(chain, S)
    b, v = prof.breakpoints, prof.values
    # w(t) = inf{u : pi(A_u) <= t}; pi(A_u) is non-increasing in u
    w = float(b[np.argmax(v <= t)])
    if t <= S.measure:
        part = np.maximum(0.0, b[1:] - np.maximum(b[:-1], w))
        rhs = float(np.sum(part * (t - v[:-1])))
    else:
        part = np.maximum(0.0, np.minimum(b[1:], w) - b[:-1])
        rhs = float(np.sum(part * (v[:-1] - t)))
    return lhs, rhs


def spread_record(chain: MarkovChain, A: SetLike, reversed: bool = False) -> SpreadRecord:
    """All seven functionals of A; flow-based ones on the reversal when `reversed`.

    psi_evo is always the given chain's value: its level sets already use the
    reversed kernel, which is the pairing the spread/evolving-set chain compares.
    """
    S = proper_set(chain, A)
    target = time_reversal(chain) if reversed else chain
    plus = spread_plus(target, S)
    minus = spread_minus(target, S)
    return SpreadRecord(
        psi_plus=plus,
        psi_minus=minus,
        psi_gl=plus + minus,
        psi_mod=spread_mod(target, S),
        psi_evo=psi_evo(chain, S),
        psi_big=psi_big(target, S),
        conductance=conductance(target, S),
        reversed=reversed,
    )


# --- size-indexed profiles -------------------------------------------------------

INF_QUANTITIES = {
    "conductance", "psi_plus", "psi_minus", "psi_gl", "psi_mod", "psi_evo", "psi_big",
    "rev_psi_plus", "rev_psi_minus", "rev_psi_gl", "rev_psi_mod", "rev_psi_big",
    "h1_plus", "h2_plus", "hinf_plus", "h1_minus", "h2_minus", "hinf_minus",
}
# sup-type h functions: base quantity, default window, whether h = c/x
H_QUANTITIES = {
    "h_plus": ("psi_plus", "half_to_x", True),
    "h_mod": ("psi_mod", "at_most_x", True),
    "h_gl": ("psi_gl", "at_most_x", False),
}
PROFILE_QUANTITIES = tuple(sorted(INF_QUANTITIES)) + tuple(H_QUANTITIES)
WINDOWS = ("at_most_x", "half_to_x")


def _sparse_table(vals, op):
    table = [vals]
    span = 1
    while 2 * span <= len(vals):
        prev = table[-1]
        table.append(op(prev[:-span], prev[span:]))
        span *= 2
    return table


def _range_reduce(table, lo, hi, op):
    """op over vals[lo:hi] for each query (hi > lo), via a sparse table."""
    length = hi - lo
    level = np.floor(np.log2(length)).astype(int)
    out = np.empty(len(lo))
    for j in np.unique(level):
        sel = level == j
        row = table[j]
        out[sel] = op(row[lo[sel]], row[hi[sel] - (1 << j)])
    return out


def size_profile(sizes, values, reduce: str = "min", window: str = "at_most_x",
                 upper: float = 0.5) -> StepFunction:
    """Exact inf/sup profile x -> reduce{value(A) : pi(A) in window(x)} on [min size, upper].

    Between breakpoints the candidate family is constant, so each piece is
    evaluated once at its midpoint; the last breakpoint (x = upper) is
    evaluated at the point itself. For ``half_to_x`` an empty window [x/2, x]
    is widened down to the largest achievable size below x.
    """
    if window not in WINDOWS:
        raise ValueError(f"window must be one of {WINDOWS}")
    op = np.minimum if reduce == "min" else np.maximum
    fill = np.inf if reduce == "min" else -np.inf
    keys = np.round(np.asarray(sizes, dtype=float), SIZE_DECIMALS)
    uniq, inv = np.unique(keys, return_inverse=True)
    per_size = np.full(len(uniq), fill)
    op.at(per_size, inv, np.asarray(values, dtype=float))

    keep = uniq <= upper + LINALG_TOL
    uniq, per_size = uniq[keep], per_size[keep]
    if len(uniq) == 0:
        raise ValueError("no subsets with size inside the profile domain")
    cuts = [uniq, [upper]]
    if window == "half_to_x":
        doubled = 2 * uniq
        cuts.append(doubled[doubled < upper])
    bps = np.unique(np.round(np.concatenate(cuts), SIZE_DECIMALS))
    bps = bps[(bps >= uniq[0]) & (bps <= upper)]

    xs = np.concatenate([0.5 * (bps[:-1] + bps[1:]), [bps[-1]]])
    hi = np.searchsorted(uniq, xs + LINALG_TOL, side="right")
    if window == "at_most_x":
        lo = np.zeros_like(hi)
    else:
        largest_below = uniq[hi - 1]
        floor = np.minimum(xs / 2, largest_below)
        lo = np.searchsorted(uniq, floor - LINALG_TOL, side="left")
    table = _sparse_table(per_size, op)
    vals = _range_reduce(table, lo, hi, op)
    return StepFunction(bps, vals)


def profile(chain: MarkovChain, quantity: str, window: str | None = None, *,
            max_states: int | None = None, threads: int | None = None, subsets=None,
            table=None) -> StepFunction:
    """Size-indexed profile of a functional over all sets with pi(A) <= 1/2.

    Infimum quantities give x -> inf_{pi(A) in window} q(A). The sup-type
    h_plus / h_mod give c(x)/x (``over_x`` step functions) and h_gl a plain
    step function. Only discrete outer sets are enumerated.
    """
    if quantity in H_QUANTITIES:
        base, default_window, over_x = H_QUANTITIES[quantity]
    elif quantity in INF_QUANTITIES:
        base, default_window, over_x = quantity, "at_most_x", False
    else:
        raise KeyError(f"unknown profile quantity {quantity!r}; choose from {PROFILE_QUANTITIES}")
    window = window or default_window
    if table is None:
        table = enumerate_subsets(chain, (base,), max_states=max_states, threads=threads, subsets=subsets)
    vals = table[base]
    if quantity == "h_gl":
        return size_profile(table.size, 1.0 / (table.size * vals), "max", window)
    prof = size_profile(table.size, vals, "min", window)
    if quantity in H_QUANTITIES:
        with np.errstate(divide="ignore"):
            return prof.map(lambda v: 1.0 / v, over_x=over_x)
    return prof

