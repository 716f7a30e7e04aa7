"""Truncated monomial algebras over a charge lattice with exact coefficients.

A :class:`MonomialBasis` enumerates the monomials x^g (g >= 0, ell(g) <= level)
and fixes the product: x^a x^b = s(a, b) x^(a+b) with s = (-1)^<a,b> in the
twisted algebra and s = 1 otherwise.  :class:`TruncatedSeries` stores integer
numerators over one common denominator so the kernels never touch Fractions.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple

import numpy as np

from ._backend import kernels
from .lattice import ClassVector, Lattice, LatticeError, PairingForm, as_class

MAX_KEYSPACE = 1 << 25


class TruncationTooLarge(ValueError):
    pass


class MonomialBasis:
    """Monomials of a lattice up to a truncation level, with kernel tables."""

    def __init__(self, lattice: Lattice, pairing: PairingForm, level: int, twisted: bool = True):
        if pairing.rank != lattice.rank:
            raise LatticeError("pairing and lattice ranks differ")
        if lattice.rank > 62:
            raise TruncationTooLarge("parity masks support rank <= 62")
        self.lattice = lattice
        self.pairing = pairing
        self.level = int(level)
        self.twisted = bool(twisted)
        d = lattice.rank
        bounds = [self.level // w for w in lattice.weights]
        strides = []
        size = 1
        for b in bounds:
            strides.append(size)
            size *= b + 1
            if size > MAX_KEYSPACE:
                raise TruncationTooLarge(
                    f"truncation {self.level} on a rank-{d} lattice is too large to index densely")
        self.strides = tuple(strides)
        monos = [tuple(0 for _ in range(d))] + list(lattice.positive_classes(self.level))
        self.monomials: Tuple[ClassVector, ...] = tuple(monos)
        self._index: Dict[ClassVector, int] = {g: i for i, g in enumerate(monos)}
        n = len(monos)
        M = pairing.matrix
        ell = np.array([lattice.ell(g) for g in monos], dtype=np.int64)
        keys = np.array([sum(c * s for c, s in zip(g, strides)) for g in monos], dtype=np.int64)
        exps = np.array(monos, dtype=np.int64).reshape(n, d)
        mat = np.array(M, dtype=np.int64).reshape(d, d)
        rowp = exps @ mat          # rowp[g] = g^T M, so <g, m> = rowp[g] . m
        colp = exps @ mat.T        # colp[m] = M m
        amask = [_bits(g) for g in monos]
        pmask = [_bits(row) for row in colp.tolist()]
        key_to_idx = np.full(size, -1, dtype=np.int32)
        key_to_idx[keys] = np.arange(n, dtype=np.int32)
        self.ell = ell.tolist()
        self.tables = kernels.make_tables(ell, keys, np.array(amask, dtype=np.uint64),
                                          np.array(pmask, dtype=np.uint64), exps, rowp,
                                          key_to_idx, self.level, self.twisted)

    def __len__(self):
        return len(self.monomials)

    def __repr__(self):
        return (f"MonomialBasis(rank={self.lattice.rank}, level={self.level}, "
                f"twisted={self.twisted}, size={len(self)})")

    def index(self, gamma: Sequence[int]) -> Optional[int]:
        return self._index.get(as_class(gamma))

    def sign(self, a: Sequence[int], b: Sequence[int]) -> int:
        if not self.twisted:
            return 1
        return -1 if self.pairing(a, b) % 2 else 1

    def generator(self, i: int) -> "TruncatedSeries":
        return TruncatedSeries.monomial(self, self.lattice.basis(i))

    def compatible(self, other: "MonomialBasis") -> bool:
        return (self is other or (self.lattice == other.lattice and self.pairing == other.pairing
                                  and self.level == other.level and self.twisted == other.twisted))


def _bits(vec: Iterable[int]) -> int:
    out = 0
    for i, c in enumerate(vec):
        if c % 2:
            out |= 1 << i
    return out


def _normalize(num: Dict[int, int], den: int) -> Tuple[Dict[int, int], int]:
    num = {k: v for k, v in num.items() if v}
    if not num:
        return {}, 1
    if den < 0:
        num = {k: -v for k, v in num.items()}
        den = -den
    g = gcd(den, *num.values())
    if g > 1:
        num = {k: v // g for k, v in num.items()}
        den //= g
    return num, den


class TruncatedSeries:
    """Finite sum of monomials x^g with ell(g) <= level and rational coefficients."""

    __slots__ = ("basis", "num", "den")

    def __init__(self, basis: MonomialBasis, terms: Mapping[Sequence[int], object] | None = None):
        self.basis = basis
        acc: Dict[ClassVector, Fraction] = {}
        for g, c in (terms or {}).items():
            g = as_class(g)
            basis.lattice.check(g)
            if any(x < 0 for x in g):
                raise LatticeError(f"monomial exponent {g} is negative")
            if basis.lattice.ell(g) > basis.level:
                continue
            acc[g] = acc.get(g, Fraction(0)) + Fraction(c)
        den = 1
        for c in acc.values():
            den = den * c.denominator // gcd(den, c.denominator)
        num = {basis.index(g): int(c * den) for g, c in acc.items()}
        self.num, self.den = _normalize(num, den)

    @classmethod
    def _raw(cls, basis: MonomialBasis, num: Dict[int, int], den: int) -> "TruncatedSeries":
        out = cls.__new__(cls)
        out.basis = basis
        out.num, out.den = _normalize(num, den)
        return out

    @classmethod
    def monomial(cls, basis: MonomialBasis, gamma: Sequence[int], coef=1) -> "TruncatedSeries":
        return cls(basis, {as_class(gamma): coef})

    @classmethod
    def zero(cls, basis: MonomialBasis) -> "TruncatedSeries":
        return cls._raw(basis, {}, 1)

    def terms(self) -> Dict[ClassVector, Fraction]:
        mon = self.basis.monomials
        return {mon[i]: Fraction(v, self.den) for i, v in sorted(self.num.items())}

    def coefficient(self, gamma: Sequence[int]) -> Fraction:
        i = self.basis.index(gamma)
        if i is None:
            return Fraction(0)
        return Fraction(self.num.get(i, 0), self.den)

    def __bool__(self):
        return bool(self.num)

    def __len__(self):
        return len(self.num)

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self.basis.compatible(other.basis) and self.num == other.num and self.den == other.den

    def __repr__(self):
        body = " + ".join(f"({c})x^{g}" for g, c in self.terms().items()) or "0"
        return f"TruncatedSeries({body})"

    def _check(self, other: "TruncatedSeries") -> None:
        if not self.basis.compatible(other.basis):
            raise LatticeError("series live in different truncated algebras")

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        self._check(other)
        if not other.num:
            return self
        if not self.num:
            return other
        den = self.den * other.den // gcd(self.den, other.den)
        fa, fb = den // self.den, den // other.den
        num = {k: v * fa for k, v in self.num.items()}
        for k, v in other.num.items():
            num[k] = num.get(k, 0) + v * fb
        return TruncatedSeries._raw(self.basis, num, den)

    def __neg__(self) -> "TruncatedSeries":
        return TruncatedSeries._raw(self.basis, {k: -v for k, v in self.num.items()}, self.den)

    def __sub__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        return self + (-other)

    def scale(self, c) -> "TruncatedSeries":
        c = Fraction(c)
        return TruncatedSeries._raw(self.basis, {k: v * c.numerator for k, v in self.num.items()},
                                    self.den * c.denominator)

    def __mul__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        self._check(other)
        num = kernels.mul(self.num, other.num, self.basis.tables)
        return TruncatedSeries._raw(self.basis, num, self.den * other.den)

    def derive(self, s: "TruncatedSeries") -> "TruncatedSeries":
        """Hamiltonian derivation with this series as Hamiltonian, applied to s."""
        self._check(s)
        num = kernels.derive(self.num, s.num, self.basis.tables)
        return TruncatedSeries._raw(self.basis, num, self.den * s.den)

    def exp_flow(self, s: "TruncatedSeries") -> "TruncatedSeries":
        """exp(derivation) applied to s; terminates because degrees strictly rise."""
        total = s
        term = s
        k = 1
        while term:
            term = self.derive(term)
            if not term:
                break
            term = TruncatedSeries._raw(self.basis, term.num, term.den * k)
            total = total + term
            k += 1
        return total

    def degrees(self) -> list:
        return sorted({self.basis.ell[i] for i in self.num})

    def graded_part(self, degree: int) -> "TruncatedSeries":
        ell = self.basis.ell
        return TruncatedSeries._raw(self.basis, {k: v for k, v in self.num.items()
                                                 if ell[k] == degree}, self.den)

    def support(self) -> list:
        mon = self.basis.monomials
        return [mon[i] for i in sorted(self.num)]
