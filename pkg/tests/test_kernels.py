import os
import random
import subprocess
import sys

import pytest

from repairlp import kernels
from repairlp.compiler import StabilizerPolicy, repair_program
from repairlp.grounder import DomainDeclaration, ground
from repairlp.oracle import random_bic_instance, random_ground_program
from repairlp.parser import parse_constraints, parse_instance
from repairlp.solver import search_rules

from conftest import BACKENDS


def test_backend_name():
    assert kernels.BACKEND in ("cython", "python")
    with pytest.raises(ValueError):
        kernels.get_backend("fortran")


def test_pure_python_fallback_is_selected_by_environment():
    env = dict(os.environ, REPAIRLP_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import repairlp; print(repairlp.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_encoding_round_trip():
    rules = random_ground_program(random.Random(3))
    enc = kernels.Encoded(rules)
    assert enc.decode(enc.encode(enc.literals)) == set(enc.literals)
    assert all(enc.comp[enc.comp[i]] == i for i in range(enc.n))


def programs():
    out = [random_ground_program(random.Random(s), defaults=True) for s in range(30)]
    for s in range(10):
        r, ics, dom = random_bic_instance(random.Random(s))
        out.append(list(ground(repair_program(ics, r.schema), r, DomainDeclaration.finite(dom)).rules))
    r = parse_instance("p(a,b). p(b,c).")
    ics = parse_constraints("-p(X,Y) v -p(Y,Z) v p(X,Z).")
    out.append(list(ground(repair_program(ics, r.schema, policy=StabilizerPolicy.NAIVE), r,
                           DomainDeclaration.finite("abc")).rules))
    return out


@pytest.mark.skipif(len(BACKENDS) < 2, reason="compiled kernels not built")
@pytest.mark.parametrize("idx", range(41))
def test_backends_agree(idx):
    rules = search_rules(programs()[idx], e_mode=True)
    enc = kernels.Encoded(rules)
    c, p = kernels.get_backend("cython"), kernels.get_backend("python")
    wc, wp = c.well_founded(enc), p.well_founded(enc)
    assert list(wc[0]) == list(wp[0]) and list(wc[1]) == list(wp[1]) and wc[2] == wp[2]
    if wc[2]:
        mc = c.enumerate_models(enc, list(wc[0]), 0, 0)
        mp = p.enumerate_models(enc, list(wp[0]), 0, 0)
        assert sorted(mc[0]) == sorted(mp[0]) and mc[2] == mp[2]
        for m in mc[0]:
            assert c.is_minimal(enc, m) == p.is_minimal(enc, m)
