from __future__ import annotations

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from localdt.motivic import MotivicSeries, MotivicWeight

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

ACCEPTANCE: dict[int, tuple[str, bool, str]] = {}


def weights(max_terms: int = 4, span: int = 6, coeff: int = 5) -> st.SearchStrategy[MotivicWeight]:
    return st.dictionaries(st.integers(-span, span), st.integers(-coeff, coeff), max_size=max_terms).map(
        MotivicWeight
    )


def series(order: int, unital: bool = False, zero_constant: bool = False, **kw) -> st.SearchStrategy[MotivicSeries]:
    body = st.lists(weights(**kw), min_size=order, max_size=order)
    if unital:
        return body.map(lambda cs: MotivicSeries([MotivicWeight.const(1)] + cs, order))
    if zero_constant:
        return body.map(lambda cs: MotivicSeries([MotivicWeight()] + cs, order))
    return st.lists(weights(**kw), min_size=order + 1, max_size=order + 1).map(lambda cs: MotivicSeries(cs, order))


def pytest_terminal_summary(terminalreporter, exitstatus, config):  # noqa: ARG001
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        name, ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k} [{'PASS' if ok else 'FAIL'}] {name}: {detail}")


@pytest.fixture
def cache_dir(tmp_path, monkeypatch):
    d = tmp_path / "cache"
    monkeypatch.setenv("LOCAL_DT_CACHE_DIR", str(d))
    return d
