import math

import numpy as np
import pytest

from isomix import errors, zoo
from isomix.chain_core import time_reversal
from isomix.enumeration import (
    ALL_QUANTITIES,
    THREADS_ENV,
    default_threads,
    enumerate_subsets,
    masks_from_ids,
)
from isomix.gradients import exit_constants, h_p
from isomix.isoperimetry import (
    conductance,
    psi_big,
    psi_evo,
    psi_plus_via_levelsets,
    spread_minus,
    spread_mod,
    spread_plus,
)

from conftest import small_zoo


def _single_values(chain, A):
    rev = time_reversal(chain)
    comp = [v for v in range(chain.n) if v not in A]
    out = {
        "conductance": conductance(chain, A),
        "psi_plus": spread_plus(chain, A),
        "psi_minus": spread_minus(chain, A),
        "psi_mod": spread_mod(chain, A),
        "psi_big": psi_big(chain, A),
        "rev_psi_plus": spread_plus(rev, A),
        "rev_psi_minus": spread_minus(rev, A),
        "rev_psi_mod": spread_mod(rev, A),
        "psi_evo": psi_evo(chain, A),
        "h1_plus": h_p(chain, A, 1).value,
        "h2_minus": h_p(chain, A, 2, "minus").value,
        "hinf_plus": h_p(chain, A, math.inf).value,
    }
    out["psi_gl"] = out["psi_plus"] + out["psi_minus"]
    p_star, p_min, p_norm = exit_constants(chain, A)
    out.update(p_star_plus=p_star, p_min_plus=p_min, p_min_norm_plus=p_norm)
    p_star, p_min, _ = exit_constants(chain, comp)
    out.update(p_star_minus=p_star, p_min_minus=p_min)
    if chain.lazy:
        out["psi_plus_levelset"] = psi_plus_via_levelsets(chain, A)
    return out


@pytest.mark.parametrize("name", ["K4", "path7", "cube3", "cycle7", "random6", "random_rev8", "continuous10"])
def test_batch_matches_single_set(name):
    chain = small_zoo()[name]
    table = enumerate_subsets(chain, ALL_QUANTITIES, max_size=None)
    assert len(table) == 2**chain.n - 2
    masks = table.masks()
    for row, mask in enumerate(masks):
        A = np.flatnonzero(mask).tolist()
        for key, value in _single_values(chain, A).items():
            assert table[key][row] == pytest.approx(value, rel=1e-11, abs=1e-13), (A, key)
        assert table["martingale"][row] == pytest.approx(table.size[row], abs=1e-12)


def test_size_filter(k4):
    table = enumerate_subsets(k4, ("psi_plus",))
    assert len(table) == 4 + 6
    assert np.all(table.size <= 0.5 + 1e-12)


def test_explicit_subsets_drop_trivial_ids(k4):
    table = enumerate_subsets(k4, ("psi_plus",), subsets=[0, 1, 3, 3, 15])
    assert table.ids.tolist() == [1, 3]


def test_masks_from_ids():
    assert masks_from_ids(np.array([0b101]), 3).tolist() == [[True, False, True]]


def test_too_large_raises():
    chain = zoo.complete_graph(23)
    with pytest.raises(errors.TooLarge):
        enumerate_subsets(chain, ("psi_plus",))
    # orbit representatives bypass exhaustive enumeration
    table = enumerate_subsets(chain, ("psi_plus",), subsets=zoo.complete_graph_orbits(23))
    assert len(table) == 11


def test_unknown_quantity(k4):
    with pytest.raises(KeyError):
        enumerate_subsets(k4, ("psi_nonsense",))


@pytest.mark.parametrize("threads", [2, 3, 8])
def test_threads_are_bit_identical(threads):
    chain = zoo.random_lazy(13, 5)
    seq = enumerate_subsets(chain, ALL_QUANTITIES, threads=1, chunk=512)
    par = enumerate_subsets(chain, ALL_QUANTITIES, threads=threads, chunk=512)
    assert np.array_equal(seq.ids, par.ids)
    for q in ALL_QUANTITIES:
        assert np.array_equal(seq[q], par[q]), q


def test_chunking_does_not_change_values():
    chain = zoo.random_lazy(9, 2)
    a = enumerate_subsets(chain, ALL_QUANTITIES, chunk=7)
    b = enumerate_subsets(chain, ALL_QUANTITIES, chunk=4096)
    for q in ALL_QUANTITIES:
        assert np.array_equal(a[q], b[q]), q


def test_thread_env(monkeypatch):
    monkeypatch.setenv(THREADS_ENV, "3")
    assert default_threads() == 3
    monkeypatch.delenv(THREADS_ENV)
    assert default_threads() >= 1


def test_complete_graph_orbits_match_exhaustive():
    for n in (5, 8, 12):
        chain = zoo.complete_graph(n)
        full = enumerate_subsets(chain, ("psi_plus", "psi_evo", "h2_minus"))
        orbit = enumerate_subsets(chain, ("psi_plus", "psi_evo", "h2_minus"), subsets=zoo.complete_graph_orbits(n))
        for q in ("psi_plus", "psi_evo", "h2_minus"):
            for size, value in zip(orbit.size, orbit[q]):
                same = np.isclose(full.size, size, atol=1e-12)
                assert np.allclose(full[q][same], value, atol=1e-13)
