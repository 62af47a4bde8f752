"""Finite Markov chains: validation, stationary distribution, reversal and distances.

A `MarkovChain` is immutable after construction. Every isoperimetric quantity
in the package is computed against one, with sets given as `StateSet` values.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import (
    EmptySet,
    FullSet,
    NotStochastic,
    Reducible,
    SingularStationary,
    ZeroReferenceMass,
)

LINALG_TOL = 1e-12
SLACK = 1e-9


@dataclass(frozen=True, eq=False)
class MarkovChain:
    P: np.ndarray
    pi: np.ndarray
    lazy: bool
    reversible: bool

    @property
    def n(self) -> int:
        return self.P.shape[0]

    @property
    def pi0(self) -> float:
        return float(self.pi.min())

    def __repr__(self) -> str:
        return f"MarkovChain(n={self.n}, lazy={self.lazy}, reversible={self.reversible})"


@dataclass(frozen=True)
class StateSet:
    members: frozenset
    measure: float
    n: int = field(repr=False)

    @classmethod
    def of(cls, chain: MarkovChain, members: Iterable[int]) -> "StateSet":
        idx = frozenset(int(i) for i in members)
        if any(i < 0 or i >= chain.n for i in idx):
            raise ValueError(f"state index out of range for n={chain.n}: {sorted(idx)}")
        measure = float(sum(chain.pi[i] for i in sorted(idx)))
        return cls(idx, measure, chain.n)

    @property
    def mask(self) -> np.ndarray:
        m = np.zeros(self.n, dtype=bool)
        m[list(self.members)] = True
        return m

    @property
    def bits(self) -> int:
        return sum(1 << i for i in self.members)

    def complement(self, chain: MarkovChain) -> "StateSet":
        return StateSet.of(chain, set(range(chain.n)) - self.members)

    def __len__(self) -> int:
        return len(self.members)


SetLike = Union[StateSet, Iterable[int]]


def as_state_set(chain: MarkovChain, A: SetLike) -> StateSet:
    if isinstance(A, StateSet):
        if A.n != chain.n:
            raise ValueError("state set belongs to a chain of different size")
        return A
    return StateSet.of(chain, A)


def proper_set(chain: MarkovChain, A: SetLike) -> StateSet:
    """Coerce and require ∅ ≠ A ≠ K."""
    S = as_state_set(chain, A)
    if len(S) == 0:
        raise EmptySet("set is empty")
    if len(S) == chain.n:
        raise FullSet("set is the whole state space")
    return S


def _is_irreducible(P: np.ndarray) -> bool:
    n = P.shape[0]
    adj = P > 0
    for graph in (adj, adj.T):
        seen = np.zeros(n, dtype=bool)
        seen[0] = True
        queue = deque([0])
        while queue:
            u = queue.popleft()
            nxt = np.flatnonzero(graph[u] & ~seen)
            seen[nxt] = True
            queue.extend(nxt.tolist())
        if not seen.all():
            return False
    return True


def stationary(P: np.ndarray) -> np.ndarray:
    """Solve pi P = pi, sum(pi) = 1 by replacing one balance equation."""
    n = P.shape[0]
    M = P.T - np.eye(n)
    M[-1, :] = 1.0
    rhs = np.zeros(n)
    rhs[-1] = 1.0
    try:
        pi = np.linalg.solve(M, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularStationary(str(exc)) from exc
    if not np.all(np.isfinite(pi)):
        raise SingularStationary("non-finite stationary solution")
    # one round of iterative refinement keeps the residual at machine level
    pi = pi + np.linalg.solve(M, rhs - M @ pi)
    return pi


def build_chain(transitions, pi=None) -> MarkovChain:
    """Validate a transition matrix and attach its stationary distribution.

    If `pi` is given it is checked against the computed distribution
    (max deviation 1e-9) and otherwise discarded.
    """
    P = np.array(transitions, dtype=float)
    if P.ndim != 2 or P.shape[0] != P.shape[1]:
        raise NotStochastic(f"transition matrix must be square, got shape {P.shape}")
    if P.shape[0] < 2:
        raise NotStochastic("need at least two states")
    if not np.all(np.isfinite(P)):
        raise NotStochastic("transition matrix has non-finite entries")
    if np.any(P < 0):
        raise NotStochastic("transition matrix has negative entries")
    dev = np.abs(P.sum(axis=1) - 1.0)
    if dev.max() > LINALG_TOL:
        row = int(dev.argmax())
        raise NotStochastic(f"row {row} sums to {float(P[row].sum())!r}")
    if not _is_irreducible(P):
        raise Reducible("chain is not irreducible")
    computed = stationary(P)
    if np.any(computed <= 0):
        raise SingularStationary("stationary distribution has non-positive mass")
    computed = computed / computed.sum()
    if pi is not None:
        given = np.asarray(pi, dtype=float)
        if given.shape != computed.shape or np.abs(given - computed).max() > SLACK:
            raise SingularStationary("supplied pi does not match the stationary distribution")
    P.setflags(write=False)
    computed.setflags(write=False)
    lazy = bool(np.all(np.diag(P) >= 0.5 - LINALG_TOL))
    flow = computed[:, None] * P
    reversible = bool(np.abs(flow - flow.T).max() <= LINALG_TOL)
    return MarkovChain(P, computed, lazy, reversible)


def time_reversal(chain: MarkovChain) -> MarkovChain:
    """Reversed chain P(u,v) = pi(v) P(v,u) / pi(u), sharing pi."""
    if chain.reversible:
        return chain
    pi = chain.pi
    R = (chain.P.T * pi[None, :]) / pi[:, None]
    # renormalise rows; the deviation is pure round-off of the balance equations
    R = R / R.sum(axis=1, keepdims=True)
    R.setflags(write=False)
    return MarkovChain(R, pi, chain.lazy, False)


def lazify(chain: MarkovChain) -> MarkovChain:
    P = 0.5 * (np.eye(chain.n) + chain.P)
    P.setflags(write=False)
    return MarkovChain(P, chain.pi, True, chain.reversible)


def ergodic_flow(chain: MarkovChain, A: SetLike, B: SetLike) -> float:
    a = as_state_set(chain, A).mask
    b = as_state_set(chain, B).mask
    if not a.any() or not b.any():
        return 0.0
    return float(chain.pi[a] @ chain.P[np.ix_(a, b)].sum(axis=1))


def _as_distribution(p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if np.any(p < 0) or abs(p.sum() - 1.0) > LINALG_TOL:
        raise ValueError("not a probability distribution")
    return p


def tv_distance(p, q) -> float:
    p, q = _as_distribution(p), _as_distribution(q)
    return 0.5 * float(np.abs(p - q).sum())


def chi2_distance(p, reference) -> float:
    """||p - pi||^2 in L2(pi), i.e. sum (p/pi - 1)^2 pi."""
    p, ref = _as_distribution(p), _as_distribution(reference)
    if np.any(ref <= 0):
        raise ZeroReferenceMass("reference distribution has a zero entry")
    return float(((p / ref - 1.0) ** 2 * ref).sum())


def load_chain(path) -> MarkovChain:
    data = json.loads(Path(path).read_text())
    P = data["P"]
    if "n" in data and len(P) != data["n"]:
        raise NotStochastic(f"declared n={data['n']} but P has {len(P)} rows")
    return build_chain(P, data.get("pi"))


def chain_to_json(chain: MarkovChain) -> str:
    payload = {"n": chain.n, "P": chain.P.tolist(), "pi": chain.pi.tolist()}
    return json.dumps(payload)


def save_chain(chain: MarkovChain, path) -> None:
    Path(path).write_text(chain_to_json(chain) + "\n")


