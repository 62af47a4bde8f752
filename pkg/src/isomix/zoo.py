"""Constructors for the example chains, plus a small registry used by the CLI.

Every constructor returns a validated `MarkovChain`; the two sharpness
constructions also return the distinguished set A.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import reduce
from typing import Callable, Sequence

import numpy as np

from .chain_core import MarkovChain, StateSet, build_chain
from .errors import BadParam, TooLarge

PRODUCT_LIMIT = 4096


def _need(cond: bool, message: str) -> None:
    if not cond:
        raise BadParam(message)


def _is_int(value) -> bool:
    return isinstance(value, (int, np.integer)) and not isinstance(value, bool)


def complete_graph(n: int) -> MarkovChain:
    """Hold 1/2 (1 + 1/n), move to each other vertex with 1/(2n)."""
    _need(_is_int(n) and n >= 2, f"complete_graph needs integer n >= 2, got {n!r}")
    P = np.full((n, n), 1.0 / (2 * n))
    np.fill_diagonal(P, 0.5 * (1.0 + 1.0 / n))
    return build_chain(P)


def complete_graph_orbits(n: int) -> list[int]:
    """Bitmask ids of the prefix sets {0..j-1}, one per orbit of the symmetric group."""
    _need(_is_int(n) and n >= 2, f"complete_graph needs integer n >= 2, got {n!r}")
    return [(1 << j) - 1 for j in range(1, n)]


def two_state(flip: float = 0.5) -> MarkovChain:
    _need(0.0 < flip <= 1.0, f"flip probability must lie in (0, 1], got {flip!r}")
    return build_chain([[1.0 - flip, flip], [flip, 1.0 - flip]])


def lazy_path(k: int) -> MarkovChain:
    """Lazy walk on [k]: 1/4 to each neighbour, endpoints keep the missing 1/4."""
    _need(_is_int(k) and k >= 2, f"lazy_path needs integer k >= 2, got {k!r}")
    P = np.zeros((k, k))
    idx = np.arange(k - 1)
    P[idx, idx + 1] = 0.25
    P[idx + 1, idx] = 0.25
    P[np.arange(k), np.arange(k)] = 1.0 - P.sum(axis=1)
    return build_chain(P)


def product(components: Sequence[MarkovChain], limit: int = PRODUCT_LIMIT) -> MarkovChain:
    """Cartesian product: pick a coordinate uniformly, step it with its own chain.

    Coordinate 0 is the most significant digit of the state index.
    """
    _need(len(components) >= 1, "product needs at least one component")
    total = math.prod(c.n for c in components)
    if total > limit:
        raise TooLarge(f"product has {total} states, limit {limit}")
    d = len(components)
    P = np.zeros((total, total))
    for i, c in enumerate(components):
        factors = [np.eye(other.n) for other in components]
        factors[i] = c.P
        P += reduce(np.kron, factors)
    return build_chain(P / d)


def hypercube(n: int) -> MarkovChain:
    """Lazy walk on {0,1}^n: flip coordinate i with probability 1/(2n)."""
    _need(_is_int(n) and n >= 1, f"hypercube needs integer n >= 1, got {n!r}")
    size = 1 << n
    if size > PRODUCT_LIMIT:
        raise TooLarge(f"hypercube has {size} states, limit {PRODUCT_LIMIT}")
    P = np.eye(size) * 0.5
    states = np.arange(size)
    for i in range(n):
        P[states, states ^ (1 << i)] += 1.0 / (2 * n)
    return build_chain(P)


def grid(k: int, n: int) -> MarkovChain:
    _need(_is_int(n) and n >= 1, f"grid needs integer n >= 1, got {n!r}")
    return product([lazy_path(k)] * n)


def barbell(m: int) -> MarkovChain:
    """Two K_m cliques joined by one edge; 1/(2m) per neighbour, hold the rest."""
    _need(_is_int(m) and m >= 3, f"barbell needs integer m >= 3, got {m!r}")
    n = 2 * m
    P = np.zeros((n, n))
    step = 1.0 / (2 * m)
    for block in (range(m), range(m, n)):
        for u in block:
            for v in block:
                if u != v:
                    P[u, v] = step
    P[m - 1, m] = P[m, m - 1] = step
    P[np.arange(n), np.arange(n)] = 1.0 - P.sum(axis=1)
    return build_chain(P)


def biased_cycle(n: int = 3, forward: float = 0.4) -> MarkovChain:
    """Lazy walk on the n-cycle stepping +1 w.p. `forward`, -1 w.p. 1/2 - forward.

    Doubly stochastic, so pi is uniform; non-reversible unless forward = 1/4.
    """
    _need(_is_int(n) and n >= 3, f"biased_cycle needs integer n >= 3, got {n!r}")
    _need(0.0 <= forward <= 0.5, f"forward probability must lie in [0, 1/2], got {forward!r}")
    P = np.eye(n) * 0.5
    idx = np.arange(n)
    P[idx, (idx + 1) % n] += forward
    P[idx, (idx - 1) % n] += 0.5 - forward
    return build_chain(P)


def random_lazy(n: int, seed: int = 0, reversible: bool = False) -> MarkovChain:
    """P = (I + Q)/2 with Q drawn from a Dirichlet(1) per row (or symmetrised weights)."""
    _need(_is_int(n) and n >= 2, f"random_lazy needs integer n >= 2, got {n!r}")
    rng = np.random.default_rng(seed)
    if reversible:
        W = rng.random((n, n)) + 0.05
        W = W + W.T
        Q = W / W.sum(axis=1, keepdims=True)
    else:
        Q = rng.dirichlet(np.ones(n), size=n)
    return build_chain(0.5 * (np.eye(n) + Q))


def _cell_mass(a: np.ndarray, b: np.ndarray, eps: float) -> np.ndarray:
    """Exact integral over [a, b] of f = 1 on [0, eps] and (eps/t)^2 above."""

    def F(t):
        return np.where(t <= eps, t, eps + eps * eps * (1.0 / eps - 1.0 / np.maximum(t, eps)))

    return F(b) - F(a)


def continuous_example(eps: float, x_set: float, n_states: int) -> tuple[MarkovChain, StateSet]:
    """Discretisation of the sharpness example on [0, 1] into equal cells.

    A lower cell i and an upper cell j exchange probability equal to the
    integral of the density over cell i; everything else is holding. Returns the
    chain and A = the cells covering [0, x_set].
    """
    _need(0.0 < eps <= 0.5, f"eps must lie in (0, 1/2], got {eps!r}")
    _need(0.0 < x_set <= 0.5, f"x_set must lie in (0, 1/2], got {x_set!r}")
    _need(_is_int(n_states) and n_states >= 10 and n_states % 2 == 0,
          f"n_states must be an even integer >= 10, got {n_states!r}")
    cells = x_set * n_states
    _need(abs(cells - round(cells)) < 1e-9, f"x_set = {x_set} is not a multiple of 1/{n_states}")
    half = n_states // 2
    edges = np.arange(half + 1) / n_states
    mass = _cell_mass(edges[:-1], edges[1:], eps)
    P = np.zeros((n_states, n_states))
    P[:half, half:] = mass[:, None]
    P[half:, :half] = mass[None, :]
    hold = 1.0 - P.sum(axis=1)
    if hold.min() < 0.5 - 1e-12:
        warnings.warn("continuous_example: holding probability below 1/2", RuntimeWarning)
    P[np.arange(n_states), np.arange(n_states)] = hold
    chain = build_chain(P)
    return chain, StateSet.of(chain, range(int(round(cells))))


def two_block_sharp(x: float, alpha: float, n_states: int) -> tuple[MarkovChain, StateSet]:
    """A chain where every state of A exits with probability alpha/2 into a block R.

    A is the first x*N states, R the next alpha*x*N states, exit flow spread
    uniformly over R. Symmetry forces every state of R to send 1/2 into A, so
    R holds exactly 1/2. Any remaining states form a lazy path hanging off the
    last state of R through a link of weight 1/(4N), which leaves that one
    state slightly below 1/2 holding.
    """
    _need(_is_int(n_states) and n_states >= 2, f"n_states must be an integer >= 2, got {n_states!r}")
    _need(0.0 < x <= 0.5, f"x must lie in (0, 1/2], got {x!r}")
    _need(0.0 < alpha <= 1.0, f"alpha must lie in (0, 1], got {alpha!r}")
    a_f, r_f = x * n_states, alpha * x * n_states
    _need(abs(a_f - round(a_f)) < 1e-9 and abs(r_f - round(r_f)) < 1e-9 and round(r_f) >= 1,
          f"x*N = {a_f} and alpha*x*N = {r_f} must be positive integers")
    a, r = int(round(a_f)), int(round(r_f))
    P = np.zeros((n_states, n_states))
    P[:a, a:a + r] = alpha / (2 * r)
    P[a:a + r, :a] = alpha / (2 * r)
    rest = list(range(a + r, n_states))
    if rest:
        link = 1.0 / (4 * n_states)
        P[a + r - 1, rest[0]] = P[rest[0], a + r - 1] = link
        for u, v in zip(rest, rest[1:]):
            P[u, v] = P[v, u] = 0.25
    P[np.arange(n_states), np.arange(n_states)] = 1.0 - P.sum(axis=1)
    chain = build_chain(P)
    return chain, StateSet.of(chain, range(a))


@dataclass(frozen=True)
class Family:
    builder: Callable
    params: tuple  # (name, type, description)
    returns_set: bool = False


FAMILIES: dict[str, Family] = {
    "complete_graph": Family(complete_graph, (("n", int, "number of vertices, >= 2"),)),
    "lazy_path": Family(lazy_path, (("k", int, "path length, >= 2"),)),
    "hypercube": Family(hypercube, (("n", int, "dimension, >= 1"),)),
    "grid": Family(grid, (("k", int, "side length, >= 2"), ("n", int, "dimension, >= 1"))),
    "barbell": Family(barbell, (("m", int, "clique size, >= 3"),)),
    "biased_cycle": Family(biased_cycle, (("n", int, "cycle length, >= 3"),
                                          ("forward", float, "forward step probability in [0, 1/2]"))),
    "random_lazy": Family(random_lazy, (("n", int, "number of states, >= 2"), ("seed", int, "RNG seed"))),
    "continuous_example": Family(continuous_example, (("eps", float, "density cutoff in (0, 1/2]"),
                                                      ("x_set", float, "size of A in (0, 1/2]"),
                                                      ("n_states", int, "even cell count, >= 10")), True),
    "two_block_sharp": Family(two_block_sharp, (("x", float, "size of A in (0, 1/2]"),
                                                ("alpha", float, "exit rate factor in (0, 1]"),
                                                ("n_states", int, "grid size")), True),
}


@dataclass(frozen=True)
class ZooSpec:
    family: str
    parameters: dict = field(default_factory=dict)

    @classmethod
    def parse(cls, family: str, tokens: Sequence[str]) -> "ZooSpec":
        """Parse positional or name=value tokens against the family schema."""
        if family not in FAMILIES:
            raise BadParam(f"unknown zoo family {family!r}; known: {', '.join(sorted(FAMILIES))}")
        schema = FAMILIES[family].params
        names = [p[0] for p in schema]
        types = {p[0]: p[1] for p in schema}
        values: dict = {}
        for pos, token in enumerate(tokens):
            if "=" in token:
                key, raw = token.split("=", 1)
            elif pos < len(names):
                key, raw = names[pos], token
            else:
                raise BadParam(f"too many parameters for {family}")
            if key not in types:
                raise BadParam(f"{family} has no parameter {key!r}")
            try:
                values[key] = types[key](raw)
            except ValueError as exc:
                raise BadParam(f"{key}: cannot parse {raw!r} as {types[key].__name__}") from exc
        return cls(family, values)

    def build(self) -> tuple[MarkovChain, StateSet | None]:
        fam = FAMILIES.get(self.family)
        if fam is None:
            raise BadParam(f"unknown zoo family {self.family!r}")
        try:
            result = fam.builder(**self.parameters)
        except TypeError as exc:
            raise BadParam(f"{self.family}: {exc}") from exc
        if fam.returns_set:
            return result
        return result, None


def schema() -> dict:
    """Family name -> list of {name, type, description}; the `zoo` subcommand prints this."""
    return {
        name: [{"name": p, "type": t.__name__, "description": d} for p, t, d in fam.params]
        for name, fam in FAMILIES.items()
    }
