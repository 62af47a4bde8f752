import warnings

import hypothesis
import numpy as np
import pytest

from isomix import zoo

hypothesis.settings.register_profile("default", max_examples=40, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=5, deadline=None)
hypothesis.settings.load_profile("default")

_ACCEPTANCE = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None or report.when != "call" and not (report.when == "setup" and report.failed):
        return
    number, title = marker.args
    detail = dict(item.user_properties).get("detail", "")
    _ACCEPTANCE[number] = (title, report.passed, detail)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        title, passed, detail = _ACCEPTANCE[number]
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{status}] {number:2d}. {title}" + (f"  ({detail})" if detail else ""))


@pytest.fixture
def k4():
    return zoo.complete_graph(4)


@pytest.fixture
def cube3():
    return zoo.hypercube(3)


@pytest.fixture
def triangle():
    return zoo.biased_cycle(3, 0.4)


def small_zoo(limit=12):
    """Named zoo chains with at most `limit` states, lazy ones first."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        chains = {
            "K4": zoo.complete_graph(4),
            "K6": zoo.complete_graph(6),
            "K8": zoo.complete_graph(8),
            "K12": zoo.complete_graph(12),
            "path4": zoo.lazy_path(4),
            "path7": zoo.lazy_path(7),
            "path12": zoo.lazy_path(12),
            "cube2": zoo.hypercube(2),
            "cube3": zoo.hypercube(3),
            "grid3x2": zoo.grid(3, 2),
            "grid2x3": zoo.grid(2, 3),
            "barbell3": zoo.barbell(3),
            "barbell6": zoo.barbell(6),
            "cycle3": zoo.biased_cycle(3, 0.4),
            "cycle7": zoo.biased_cycle(7, 0.5),
            "random6": zoo.random_lazy(6, 11),
            "random9": zoo.random_lazy(9, 12),
            "random_rev8": zoo.random_lazy(8, 13, reversible=True),
            "continuous10": zoo.continuous_example(0.1, 0.5, 10)[0],
            "continuous12": zoo.continuous_example(0.25, 0.25, 12)[0],
            "two_block8": zoo.two_block_sharp(0.5, 1.0, 8)[0],
            "two_block_nonlazy8": zoo.two_block_sharp(0.25, 1.0, 8)[0],
            "two_block12": zoo.two_block_sharp(0.25, 1 / 3, 12)[0],
        }
    return {k: c for k, c in chains.items() if c.n <= limit}


def random_stochastic(rng, n, lazy=True, reversible=False):
    if reversible:
        W = rng.random((n, n)) + 0.01
        W = W + W.T
        Q = W / W.sum(axis=1, keepdims=True)
    else:
        Q = rng.random((n, n)) + 0.01
        Q /= Q.sum(axis=1, keepdims=True)
    return 0.5 * (np.eye(n) + Q) if lazy else Q
