import pytest

from repairlp import kernels
from repairlp.parser import format_literal, parse_constraints, parse_instance

BACKENDS = ["python"]
try:
    kernels.get_backend("cython")
    BACKENDS.insert(0, "cython")
except ImportError:  # pragma: no cover - depends on the build
    pass


@pytest.fixture(params=BACKENDS)
def backend(request, monkeypatch):
    """Run a test once per available search kernel."""
    monkeypatch.setattr(kernels, "backend", kernels.get_backend(request.param))
    return request.param


def text(lits) -> set:
    return {format_literal(l) for l in lits}


def primed_text(lits) -> set:
    return {format_literal(l) for l in lits if l.atom.primed}


def facts_text(instance) -> set:
    return {format_literal(l) for l in _as_lits(instance)}


def _as_lits(instance):
    from repairlp.model import Literal

    return [Literal(a) for a in instance.facts]


@pytest.fixture
def salary():
    r = parse_instance('salary("V.Smith",5000). salary("V.Smith",8000). '
                       'salary("P.Jones",3000). salary("M.Stone",7000).')
    return r, parse_constraints("-salary(X,Y) v -salary(X,Z) v Y=Z.")


@pytest.fixture
def emp():
    r = parse_instance('%! emp:2:name,number\n'
                       'emp("Irwin Koper","677-223-112"). emp("Irwin Koper","952-223-564"). '
                       'emp("Michael Baneman","334-454-991").')
    ics = parse_constraints("-emp(X,Y) v -emp(X,Z) v Y=Z.\n-emp(Y,X) v -emp(Z,X) v Y=Z.")
    return r, ics


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        ok, label, detail = results[number]
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {label}"
        terminalreporter.write_line(line + (f"  ({detail})" if detail else ""))
