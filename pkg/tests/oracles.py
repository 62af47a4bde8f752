"""Independent reference computations used to freeze expected values.

Nothing here calls into isomix beyond reading `chain.P` / `chain.pi`. Flow
infima come from a linear program over fractional subsets, integrals from
adaptive quadrature, spectra from a general (non-symmetric) eigensolver.
"""

import itertools
import math

import numpy as np
from scipy import integrate, linalg, optimize


def stationary(P):
    w, V = linalg.eig(P.T)
    k = int(np.argmin(np.abs(w - 1.0)))
    v = np.real(V[:, k])
    return v / v.sum()


def reversal(P, pi):
    n = len(pi)
    R = np.empty_like(P)
    for u in range(n):
        for v in range(n):
            R[u, v] = pi[v] * P[v, u] / pi[u]
    return R


def _lp_flow(weights, rates, total, sense):
    """min (or max) sum w_v r_v subject to sum w_v = total, 0 <= w_v <= weights_v."""
    if total <= 0:
        return 0.0
    c = np.asarray(rates, dtype=float) * (1 if sense == "min" else -1)
    res = optimize.linprog(c, A_eq=np.ones((1, len(c))), b_eq=[total],
                           bounds=list(zip(np.zeros(len(c)), weights)), method="highs")
    assert res.status == 0, res.message
    return float(res.fun) * (1 if sense == "min" else -1)


def flow(P, pi, A, t, sense="min"):
    """Psi(t, A^c) straight from its definition as an optimisation over fractional sets."""
    A = sorted(A)
    Ac = [v for v in range(len(pi)) if v not in A]
    x = pi[A].sum()
    if t <= x:
        rates = [P[v, Ac].sum() for v in A]
        return _lp_flow(pi[A], rates, t, sense)
    rates = [P[v, A].sum() for v in Ac]
    return _lp_flow(pi[Ac], rates, 1.0 - t, sense)


def _kinks(pi, A):
    A = sorted(A)
    Ac = [v for v in range(len(pi)) if v not in A]
    x = pi[A].sum()
    pts = {0.0, x, 1.0}
    for r in range(1, len(A) + 1):
        for c in itertools.combinations(A, r):
            pts.add(float(pi[list(c)].sum()))
    for r in range(1, len(Ac) + 1):
        for c in itertools.combinations(Ac, r):
            pts.add(1.0 - float(pi[list(c)].sum()))
    return sorted(p for p in pts if 0.0 <= p <= 1.0)


def _quad(f, pts):
    total = 0.0
    for a, b in zip(pts, pts[1:]):
        if b > a:
            total += integrate.quad(f, a, b, epsabs=1e-14, epsrel=1e-12, limit=200)[0]
    return total


def spreads(P, pi, A):
    """dict of psi_plus, psi_minus, psi_gl, psi_mod, psi_big via quadrature of LP profiles."""
    x = pi[sorted(A)].sum()
    pts = _kinks(pi, A)
    inside = [p for p in pts if p <= x]
    outside = [p for p in pts if p >= x]

    def f(t):
        return flow(P, pi, A, t)

    plus = _quad(f, inside) / x**2
    minus = _quad(f, outside) / x**2
    # min(t, 1 - t) adds a kink at 1/2
    mod = _quad(lambda t: f(t) / min(t, 1 - t) if 0 < t < 1 else 0.0, sorted({*pts, 0.5})) / x
    big = _quad(lambda t: flow(P, pi, A, t, "max"), inside) / x**2
    return {"psi_plus": plus, "psi_minus": minus, "psi_gl": plus + minus, "psi_mod": mod, "psi_big": big}


def level_sizes(P, pi, A):
    R = reversal(P, pi)
    back = np.array([R[y, sorted(A)].sum() for y in range(len(pi))])
    return back, (lambda u: float(sum(pi[y] for y in range(len(pi)) if back[y] > u)))


def psi_evo(P, pi, A):
    x = pi[sorted(A)].sum()
    back, size = level_sizes(P, pi, A)
    pts = sorted({0.0, 1.0, *[float(b) for b in back if 0 < b < 1]})
    return 1.0 - _quad(lambda u: math.sqrt(size(u) / x), pts)


def psi_plus_levelsets(P, pi, A):
    x = pi[sorted(A)].sum()
    back, size = level_sizes(P, pi, A)
    pts = sorted({0.5, 1.0, *[float(b) for b in back if 0.5 < b < 1]})
    return 0.5 * _quad(lambda u: ((x - size(u)) / x) ** 2, pts)


def gradients(P, pi, A, sign="plus"):
    A = sorted(A)
    Ac = [v for v in range(len(pi)) if v not in A]
    src, dst = (A, Ac) if sign == "plus" else (Ac, A)
    denom = min(pi[A].sum(), pi[Ac].sum())
    rates = {v: sum(P[v, w] for w in dst) for v in src}
    h1 = sum(pi[v] * rates[v] for v in src) / denom
    h2 = sum(pi[v] * math.sqrt(rates[v]) for v in src) / denom
    hinf = sum(pi[v] for v in src if rates[v] > 0) / denom
    p_star = max(rates.values())
    p_min = min(P[v, w] for v in src for w in dst if P[v, w] > 0)
    return {"h1": h1, "h2": h2, "hinf": hinf, "p_star": p_star, "p_min": p_min}


def spectral_gap(P):
    ev = np.sort(np.real(linalg.eigvals(P)))
    return 1.0 - ev[-2]


def mixing_time(P, pi, eps, metric="tv", cap=100000):
    n = len(pi)
    for t in range(cap):
        Pt = np.linalg.matrix_power(P, t)
        worst = 0.0
        for x in range(n):
            row = Pt[x]
            if metric == "tv":
                d = 0.5 * sum(abs(row[y] - pi[y]) for y in range(n))
            else:
                d = sum((row[y] - pi[y]) ** 2 / pi[y] for y in range(n))
            worst = max(worst, d)
        if worst <= eps:
            return t
    raise RuntimeError("cap")


def all_subsets(n, max_size=None, pi=None):
    for r in range(1, n):
        for c in itertools.combinations(range(n), r):
            if max_size is None or pi[list(c)].sum() <= max_size + 1e-12:
                yield c
