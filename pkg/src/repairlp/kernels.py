"""Integer encoding of ground programs and selection of the search backend.

The compiled extension ``_ckernels`` is used when it imports; otherwise, or
when ``REPAIRLP_PURE_PYTHON=1`` is set, the pure-Python ``_pykernels`` is
used.  Both expose the same three functions over an :class:`Encoded`
program and are tested against each other.
"""
from __future__ import annotations

import os
from array import array

from .model import Literal, complement

UNK, TRUE, FALSE = 0, 1, 2


def _csr(rows):
    starts = array("i", [0])
    data = array("i")
    for row in rows:
        data.extend(row)
        starts.append(len(data))
    if not data:
        data.append(0)  # typed memoryviews reject empty buffers
    return starts, data


class Encoded:
    """A ground program over literal ids ``0..n-1`` in canonical order.

    Rules are stored row-compressed: ``hs/hd`` heads, ``ps/pd`` positive
    body, ``ns/nd`` default-negated body.  ``ohs/ohd``, ``ops/opd`` and
    ``ons/ond`` list, per literal, the rules it occurs in.
    """

    def __init__(self, rules, universe=()):
        lits = set(universe)
        for r in rules:
            lits.update(r.head)
            lits.update(b.lit for b in r.body)
        lits |= {complement(l) for l in lits}
        self.literals = sorted(lits, key=Literal.sort_key)
        self.ids = {l: i for i, l in enumerate(self.literals)}
        self.n = len(self.literals)
        self.comp = array("i", [self.ids[complement(l)] for l in self.literals] or [0])
        self.rules = list(rules)
        heads, poss, negs = [], [], []
        for r in self.rules:
            heads.append(sorted({self.ids[l] for l in r.head}))
            poss.append(sorted({self.ids[b.lit] for b in r.body if not b.naf}))
            negs.append(sorted({self.ids[b.lit] for b in r.body if b.naf}))
        self.nr = len(self.rules)
        self.hs, self.hd = _csr(heads)
        self.ps, self.pd = _csr(poss)
        self.ns, self.nd = _csr(negs)
        occ_h = [[] for _ in range(self.n)]
        occ_p = [[] for _ in range(self.n)]
        occ_n = [[] for _ in range(self.n)]
        for ri in range(self.nr):
            for i in heads[ri]:
                occ_h[i].append(ri)
            for i in poss[ri]:
                occ_p[i].append(ri)
            for i in negs[ri]:
                occ_n[i].append(ri)
        self.ohs, self.ohd = _csr(occ_h)
        self.ops, self.opd = _csr(occ_p)
        self.ons, self.ond = _csr(occ_n)

    def encode(self, literals):
        return sorted(self.ids[l] for l in literals if l in self.ids)

    def decode(self, ids):
        return frozenset(self.literals[i] for i in ids)


def _load():
    if os.environ.get("REPAIRLP_PURE_PYTHON", "") not in ("", "0"):
        from . import _pykernels as k
        return k, "python"
    try:
        from . import _ckernels as k
        return k, "cython"
    except ImportError:
        from . import _pykernels as k
        return k, "python"


backend, BACKEND = _load()


def get_backend(name: str):
    if name == "python":
        from . import _pykernels
        return _pykernels
    if name == "cython":
        from . import _ckernels
        return _ckernels
    raise ValueError(f"unknown backend {name!r}")
