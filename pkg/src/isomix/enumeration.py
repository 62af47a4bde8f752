"""Vectorised evaluation of set functionals over batches of subsets.

Subsets are encoded as integer bitmasks (bit i set when state i is in A) and
evaluated in fixed-size chunks of boolean masks. Chunk boundaries never depend
on the thread count, so a threaded run reproduces the sequential one bit for
bit: every subset's values come from the same arithmetic, and the only
cross-subset reductions downstream are min/max.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .chain_core import LINALG_TOL, MarkovChain, time_reversal
from .errors import TooLarge
from .functions import _tsharp_integral

DEFAULT_MAX_STATES = 22
CHUNK = 4096
THREADS_ENV = "ISOMIX_THREADS"

FLOW = ("flow", "flow_back", "conductance", "psi_plus", "psi_minus", "psi_gl", "psi_mod", "psi_big")
REV_FLOW = tuple("rev_" + q for q in FLOW if q not in ("flow", "flow_back", "conductance"))
LEVEL = ("psi_evo", "psi_plus_levelset", "martingale")
GRADIENT = tuple(
    f"{name}_{sign}"
    for sign in ("plus", "minus")
    for name in ("h1", "h2", "hinf", "p_star", "p_min", "p_min_norm")
)
ALL_QUANTITIES = FLOW + REV_FLOW + LEVEL + GRADIENT


def default_threads() -> int:
    env = os.environ.get(THREADS_ENV)
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def check_size(chain: MarkovChain, max_states: int | None) -> None:
    limit = DEFAULT_MAX_STATES if max_states is None else max_states
    if chain.n > limit:
        raise TooLarge(f"{chain.n} states exceeds the enumeration limit of {limit}")


def masks_from_ids(ids: np.ndarray, n: int) -> np.ndarray:
    ids = np.asarray(ids, dtype=np.int64)
    return ((ids[:, None] >> np.arange(n, dtype=np.int64)) & 1).astype(bool)


def _sorted_rates(weights, rates, members, descending):
    """Reorder each row so members come first, sorted by rate; ties keep index order."""
    if descending:
        key = np.where(members, -rates, np.inf)
    else:
        key = np.where(members, rates, np.inf)
    order = np.argsort(key, axis=1, kind="stable")
    return np.take_along_axis(weights, order, 1), np.take_along_axis(rates, order, 1)


def _spread_numerator(weights, rates):
    """Sum over the sorted order of rate * (mass before * w + w^2 / 2)."""
    before = np.cumsum(weights, axis=1) - weights
    return np.sum(rates * (before * weights + 0.5 * weights * weights), axis=1)


def _tsharp_numerator(weights, rates):
    """Integral of the increasing-rate flow profile against 1/min(s, 1-s)."""
    ends = np.cumsum(weights, axis=1)
    starts = ends - weights
    flow_end = np.cumsum(weights * rates, axis=1)
    flow_start = flow_end - weights * rates
    alpha = flow_start - rates * starts
    return _tsharp_integral(starts, ends, alpha, rates).sum(axis=1)


def _flow_block(P, pi, M, out, prefix=""):
    Mf = M.astype(float)
    Cf = 1.0 - Mf
    exit_ = Cf @ P.T
    entry = Mf @ P.T
    wA = Mf * pi
    wC = Cf * pi
    size = wA.sum(axis=1)
    csize = wC.sum(axis=1)

    ws, rs = _sorted_rates(wA, exit_, M, descending=True)
    plus = _spread_numerator(ws, rs) / size**2
    ws, rs = _sorted_rates(wA, exit_, M, descending=False)
    big = _spread_numerator(ws, rs) / size**2
    j_inside = _tsharp_numerator(ws, rs)

    wsc, rsc = _sorted_rates(wC, entry, ~M, descending=True)
    minus = _spread_numerator(wsc, rsc) / size**2
    wsc, rsc = _sorted_rates(wC, entry, ~M, descending=False)
    j_outside = _tsharp_numerator(wsc, rsc)

    out[prefix + "psi_plus"] = plus
    out[prefix + "psi_minus"] = minus
    out[prefix + "psi_gl"] = plus + minus
    out[prefix + "psi_mod"] = (j_inside + j_outside) / size
    out[prefix + "psi_big"] = big
    if not prefix:
        flow = np.sum(wA * exit_, axis=1)
        out["flow"] = flow
        out["flow_back"] = np.sum(wC * entry, axis=1)
        out["conductance"] = flow / size
    return exit_, entry, size, csize


def _level_block(R, pi, M, size, out):
    back = M.astype(float) @ R.T
    order = np.argsort(-back, axis=1, kind="stable")
    r = np.take_along_axis(back, order, 1)
    level = np.cumsum(pi[order], axis=1)
    lower = np.concatenate([r[:, 1:], np.zeros((len(r), 1))], axis=1)
    length = r - lower
    ratio = level / size[:, None]
    out["psi_evo"] = 1.0 - np.sum(length * np.sqrt(ratio), axis=1)
    out["martingale"] = np.sum(length * level, axis=1)
    upper_len = np.maximum(0.0, r - np.maximum(lower, 0.5))
    top = np.maximum(0.0, 1.0 - np.maximum(r[:, 0], 0.5))
    out["psi_plus_levelset"] = 0.5 * (np.sum(upper_len * (1.0 - ratio) ** 2, axis=1) + top)


def _gradient_block(P, pi, M, exit_, entry, size, csize, out):
    denom = np.minimum(size, csize)
    positive = P > 0
    inv_pi = 1.0 / pi
    for sign, members, rates in (("plus", M, exit_), ("minus", ~M, entry)):
        w = members.astype(float) * pi
        out[f"h1_{sign}"] = np.sum(w * rates, axis=1) / denom
        out[f"h2_{sign}"] = np.sum(w * np.sqrt(rates), axis=1) / denom
        out[f"hinf_{sign}"] = np.sum(w * (rates > 0), axis=1) / denom
        out[f"p_star_{sign}"] = np.max(np.where(members, rates, -np.inf), axis=1)
        edge = members[:, :, None] & ~members[:, None, :] & positive[None, :, :]
        out[f"p_min_{sign}"] = np.min(np.where(edge, P[None, :, :], np.inf), axis=(1, 2))
        out[f"p_min_norm_{sign}"] = np.min(np.where(edge, (P * inv_pi[None, :])[None, :, :], np.inf), axis=(1, 2))


def evaluate_masks(chain: MarkovChain, masks: np.ndarray, quantities: Iterable[str] = ALL_QUANTITIES,
                   reversal: MarkovChain | None = None) -> dict:
    """Evaluate the requested functionals on each row of a boolean mask matrix."""
    wanted = set(quantities)
    unknown = wanted - set(ALL_QUANTITIES) - {"size"}
    if unknown:
        raise KeyError(f"unknown quantities: {sorted(unknown)}")
    M = np.asarray(masks, dtype=bool)
    P, pi = chain.P, chain.pi
    out: dict = {}
    exit_, entry, size, csize = _flow_block(P, pi, M, out)
    out["size"] = size
    if wanted & set(REV_FLOW):
        rev = reversal if reversal is not None else time_reversal(chain)
        if rev is chain:
            for q in REV_FLOW:
                out[q] = out[q[4:]]
        else:
            _flow_block(rev.P, pi, M, out, prefix="rev_")
    if wanted & set(LEVEL):
        rev = reversal if reversal is not None else time_reversal(chain)
        _level_block(rev.P, pi, M, size, out)
    if wanted & set(GRADIENT):
        _gradient_block(P, pi, M, exit_, entry, size, csize, out)
    return {k: v for k, v in out.items() if k in wanted or k == "size"}


@dataclass
class SubsetTable:
    """Per-subset values for an enumerated family of subsets."""

    n: int
    ids: np.ndarray
    size: np.ndarray
    values: dict = field(default_factory=dict)

    def __getitem__(self, name):
        return self.size if name == "size" else self.values[name]

    def __len__(self):
        return len(self.ids)

    def masks(self) -> np.ndarray:
        return masks_from_ids(self.ids, self.n)


def _chunk_ids(n: int, start: int, stop: int) -> np.ndarray:
    ids = np.arange(start, stop, dtype=np.int64)
    full = (1 << n) - 1
    return ids[(ids != 0) & (ids != full)]


def enumerate_subsets(chain: MarkovChain, quantities: Sequence[str] = ALL_QUANTITIES, *,
                      max_size: float | None = 0.5, max_states: int | None = None,
                      threads: int | None = None, subsets: Iterable[int] | None = None,
                      chunk: int = CHUNK) -> SubsetTable:
    """Evaluate functionals on every proper nonempty subset (or on `subsets` if given).

    Sets with pi(A) > max_size (+1e-12) are dropped; pass ``max_size=None`` to keep all.
    """
    n = chain.n
    if subsets is None:
        check_size(chain, max_states)
        total = 1 << n
        tasks = [("range", s, min(s + chunk, total)) for s in range(0, total, chunk)]
    else:
        ids = np.unique(np.asarray(list(subsets), dtype=np.int64))
        full = (1 << n) - 1
        ids = ids[(ids != 0) & (ids != full)]
        tasks = [("ids", ids[s:s + chunk], None) for s in range(0, len(ids), chunk)]
    reversal = time_reversal(chain)
    quantities = tuple(quantities)

    def work(task):
        kind, a, b = task
        ids = _chunk_ids(n, a, b) if kind == "range" else a
        vals = evaluate_masks(chain, masks_from_ids(ids, n), quantities, reversal)
        if max_size is not None:
            keep = vals["size"] <= max_size + LINALG_TOL
            ids = ids[keep]
            vals = {k: v[keep] for k, v in vals.items()}
        return ids, vals

    threads = default_threads() if threads is None else max(1, threads)
    if threads == 1 or len(tasks) == 1:
        results = [work(t) for t in tasks]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(work, tasks))

    if not results:
        return SubsetTable(n, np.zeros(0, dtype=np.int64), np.zeros(0), {q: np.zeros(0) for q in quantities})
    ids = np.concatenate([r[0] for r in results])
    size = np.concatenate([r[1]["size"] for r in results])
    values = {q: np.concatenate([r[1][q] for r in results]) for q in quantities}
    return SubsetTable(n, ids, size, values)
