import pytest

from flatcone import _engine
from flatcone.polycore import RingContext, parse_poly

_real_buchberger = _engine.buchberger


def _self_check(polys, order, basis):
    """Buchberger criterion, reducedness and input membership for one engine result."""
    red = [(_engine.leading(g, order), g) for g in basis]
    for i, (la, a) in enumerate(red):
        assert a[la] == 1
        for j, (lb, b) in enumerate(red):
            if i == j:
                continue
            assert not any(_engine.divides(lb, m) for m in a), "basis is not reduced"
            if j > i and la[0] == lb[0]:
                s = _engine._spoly(a, la, b, lb)
                assert not (s and _engine.normal_form(s, red, order)), "S-pair does not reduce"
    for p in polys:
        if p:
            assert not _engine.normal_form(p, red, order), "input outside the basis span"


@pytest.fixture(autouse=True)
def buchberger_self_check(request, monkeypatch):
    """Re-check every Groebner basis the engine hands back, unless a test opts out."""
    if request.node.get_closest_marker("no_gb_check"):
        yield
        return

    def checked(polys, order, module=False):
        polys = [dict(p) for p in polys]
        basis = _real_buchberger(polys, order, module)
        _self_check(polys, order, basis)
        return basis

    monkeypatch.setattr(_engine, "buchberger", checked)
    yield


def pytest_configure(config):
    config.addinivalue_line("markers", "no_gb_check: skip the per-basis Buchberger self-check")
    config.addinivalue_line("markers", "slow: long-running example computation")


@pytest.fixture
def xyz():
    return RingContext(("x", "y", "z"))


def poly(ctx, s):
    return parse_poly(s, ctx)


ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, label, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {label}  ({detail})")
