import numpy as np
import pytest
from hypothesis import strategies as st

from tensorlink import ContactTensor


def random_tensor(rng, n_nodes, n_periods, density=0.3):
    upper = rng.random((n_periods, n_nodes, n_nodes)) < density
    upper = np.triu(upper, k=1)
    return ContactTensor(upper | upper.transpose(0, 2, 1))


@st.composite
def tensors(draw, max_nodes=8, max_periods=10, min_nodes=2):
    n = draw(st.integers(min_nodes, max_nodes))
    t = draw(st.integers(1, max_periods))
    n_pairs = n * (n - 1) // 2
    bits = draw(st.lists(st.booleans(), min_size=t * n_pairs, max_size=t * n_pairs))
    slices = np.zeros((t, n, n), dtype=bool)
    iu, ju = np.triu_indices(n, k=1)
    flat = np.array(bits, dtype=bool).reshape(t, n_pairs) if n_pairs else np.zeros((t, 0), bool)
    slices[:, iu, ju] = flat
    slices[:, ju, iu] = flat
    return ContactTensor(slices)


binary_sequences = st.lists(st.integers(0, 1), min_size=1, max_size=40)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_ACCEPTANCE = []


@pytest.fixture
def criterion(request):
    """Record one acceptance line: ``criterion(label)`` inside a test."""
    state = {}

    def record(label, detail=""):
        state["label"] = label
        state["detail"] = detail

    yield record
    if "label" in state:
        failed = getattr(request.node, "_call_failed", False)
        line = f"[{'FAIL' if failed else 'PASS'}] {state['label']}"
        if state["detail"]:
            line += f"  ({state['detail']})"
        _ACCEPTANCE.append(line)
        print(line)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when == "call" and report.failed:
        item._call_failed = True


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
