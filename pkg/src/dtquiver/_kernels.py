"""Pure-Python kernels for truncated monomial algebras.

Series are dicts ``{monomial index: integer numerator}``; the caller keeps the
common denominator.  ``_ckernels.pyx`` implements the same functions.
"""
from __future__ import annotations

from typing import NamedTuple, Sequence

BACKEND = "python"


class Tables(NamedTuple):
    ell: list
    keys: list
    amask: list
    pmask: list
    exps: list
    rowp: list
    key_to_idx: list
    level: int
    twisted: bool


def make_tables(ell, keys, amask, pmask, exps, rowp, key_to_idx, level, twisted) -> Tables:
    return Tables(
        [int(x) for x in ell],
        [int(x) for x in keys],
        [int(x) for x in amask],
        [int(x) for x in pmask],
        [tuple(int(c) for c in row) for row in exps],
        [tuple(int(c) for c in row) for row in rowp],
        [int(x) for x in key_to_idx],
        int(level),
        bool(twisted),
    )


def _by_degree(s: dict, ell: Sequence[int]):
    return sorted(s.items(), key=lambda kv: ell[kv[0]])


def mul(a: dict, b: dict, T: Tables) -> dict:
    """Truncated (optionally sign-twisted) product of two sparse series."""
    ell, keys, amask, pmask, k2i = T.ell, T.keys, T.amask, T.pmask, T.key_to_idx
    level, twisted = T.level, T.twisted
    bs = _by_degree(b, ell)
    out: dict = {}
    for ia, ca in a.items():
        room = level - ell[ia]
        if room < 0:
            continue
        ka = keys[ia]
        ma = amask[ia]
        for ib, cb in bs:
            if ell[ib] > room:
                break
            c = ca * cb
            if twisted and (ma & pmask[ib]).bit_count() & 1:
                c = -c
            k = k2i[ka + keys[ib]]
            out[k] = out.get(k, 0) + c
    return {k: v for k, v in out.items() if v}


def derive(h: dict, s: dict, T: Tables) -> dict:
    """Hamiltonian derivation: x^mu -> sum_g h_g t(g,mu) <g,mu> x^(g+mu)."""
    ell, keys, exps, rowp, k2i = T.ell, T.keys, T.exps, T.rowp, T.key_to_idx
    level, twisted = T.level, T.twisted
    ss = _by_degree(s, ell)
    out: dict = {}
    for ig, cg in h.items():
        room = level - ell[ig]
        if room < 0:
            continue
        kg = keys[ig]
        row = rowp[ig]
        for im, cm in ss:
            if ell[im] > room:
                break
            p = 0
            for r, e in zip(row, exps[im]):
                p += r * e
            if p == 0:
                continue
            c = cg * cm * p
            if twisted and p & 1:
                c = -c
            k = k2i[kg + keys[im]]
            out[k] = out.get(k, 0) + c
    return {k: v for k, v in out.items() if v}
