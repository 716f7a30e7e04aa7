"""Charge lattices, antisymmetric pairings, spectra and multi-cover transforms.

Classes are plain tuples of ints.  All values are exact (``Fraction``).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Dict, Iterable, Iterator, Mapping, Sequence, Tuple

ClassVector = Tuple[int, ...]

OMEGA = "omega"
DTBAR = "dtbar"
KINDS = (OMEGA, DTBAR)


class LatticeError(ValueError):
    """Invalid lattice data (dimension mismatch, zero class, bad map...)."""


def as_class(gamma: Iterable[int]) -> ClassVector:
    return tuple(int(c) for c in gamma)


def is_positive(gamma: Sequence[int]) -> bool:
    """Nonnegative orthant minus zero."""
    return all(c >= 0 for c in gamma) and any(c != 0 for c in gamma)


def add(gamma: Sequence[int], mu: Sequence[int]) -> ClassVector:
    return tuple(a + b for a, b in zip(gamma, mu))


def sub(gamma: Sequence[int], mu: Sequence[int]) -> ClassVector:
    return tuple(a - b for a, b in zip(gamma, mu))


def scale(m: int, gamma: Sequence[int]) -> ClassVector:
    return tuple(m * c for c in gamma)


@dataclass(frozen=True)
class Lattice:
    """Z^rank with a positive additive truncation functional."""

    rank: int
    weights: Tuple[int, ...] = ()

    def __post_init__(self):
        if self.rank < 1:
            raise LatticeError("lattice rank must be positive")
        if not self.weights:
            object.__setattr__(self, "weights", (1,) * self.rank)
        object.__setattr__(self, "weights", tuple(int(w) for w in self.weights))
        if len(self.weights) != self.rank:
            raise LatticeError("need one weight per basis vector")
        if any(w < 1 for w in self.weights):
            raise LatticeError("weights must be >= 1")

    def ell(self, gamma: Sequence[int]) -> int:
        self.check(gamma)
        return sum(w * c for w, c in zip(self.weights, gamma))

    def check(self, gamma: Sequence[int]) -> None:
        if len(gamma) != self.rank:
            raise LatticeError(
                f"class {tuple(gamma)} has length {len(gamma)}, lattice rank is {self.rank}"
            )

    def basis(self, i: int) -> ClassVector:
        return tuple(1 if j == i else 0 for j in range(self.rank))

    def positive_classes(self, level: int) -> Iterator[ClassVector]:
        """All positive classes with ell <= level, ordered by (ell, lex)."""
        found = []

        def rec(i, budget, prefix):
            if i == self.rank:
                found.append(tuple(prefix))
                return
            w = self.weights[i]
            for c in range(budget // w + 1):
                prefix.append(c)
                rec(i + 1, budget - c * w, prefix)
                prefix.pop()

        rec(0, level, [])
        found = [g for g in found if any(g)]
        found.sort(key=lambda g: (self.ell(g), g))
        return iter(found)


@dataclass(frozen=True)
class PairingForm:
    """Integer antisymmetric bilinear form <g, m> = g^T M m."""

    matrix: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(int(x) for x in row) for row in self.matrix)
        object.__setattr__(self, "matrix", rows)
        d = len(rows)
        if any(len(row) != d for row in rows):
            raise LatticeError("pairing matrix must be square")
        for i in range(d):
            for j in range(d):
                if rows[i][j] != -rows[j][i]:
                    raise LatticeError("pairing matrix is not antisymmetric")

    @property
    def rank(self) -> int:
        return len(self.matrix)

    def __call__(self, gamma: Sequence[int], mu: Sequence[int]) -> int:
        return pair(self, gamma, mu)

    def row(self, gamma: Sequence[int]) -> Tuple[int, ...]:
        """Coefficients of the functional <gamma, ->."""
        d = self.rank
        return tuple(sum(gamma[i] * self.matrix[i][j] for i in range(d)) for j in range(d))

    def is_invisible(self, gamma: Sequence[int]) -> bool:
        """True when <gamma, -> vanishes on the whole lattice."""
        return not any(self.row(gamma))


def pair(P: PairingForm, gamma: Sequence[int], mu: Sequence[int]) -> int:
    d = P.rank
    if len(gamma) != d or len(mu) != d:
        raise LatticeError("dimension mismatch in pairing")
    m = P.matrix
    return sum(gamma[i] * m[i][j] * mu[j] for i in range(d) for j in range(d) if m[i][j])


def class_gcd(beta: Sequence[int]) -> int:
    g = 0
    for c in beta:
        g = gcd(g, c)
    return g


def divisors(beta: Sequence[int]) -> list[int]:
    """Positive m with beta/m integral, ascending."""
    g = class_gcd(beta)
    if g == 0:
        raise LatticeError("divisors of the zero class are undefined")
    small = [m for m in range(1, int(g**0.5) + 1) if g % m == 0]
    return sorted(set(small + [g // m for m in small]))


def mobius(m: int) -> int:
    if m < 1:
        raise ValueError("mobius needs a positive integer")
    result = 1
    p = 2
    while p * p <= m:
        if m % p == 0:
            m //= p
            if m % p == 0:
                return 0
            result = -result
        p += 1
    if m > 1:
        result = -result
    return result


class Spectrum(Mapping):
    """Finitely supported map from positive classes to exact rationals.

    ``kind`` is ``"omega"`` or ``"dtbar"``.  Entries with ell > truncation are
    rejected, zeros are dropped.
    """

    __slots__ = ("kind", "lattice", "truncation", "_entries")

    def __init__(self, kind: str, lattice: Lattice, truncation: int,
                 entries: Mapping[Sequence[int], object] | None = None):
        if kind not in KINDS:
            raise LatticeError(f"unknown spectrum kind {kind!r}")
        self.kind = kind
        self.lattice = lattice
        self.truncation = int(truncation)
        data: Dict[ClassVector, Fraction] = {}
        for gamma, value in (entries or {}).items():
            gamma = as_class(gamma)
            lattice.check(gamma)
            if not is_positive(gamma):
                raise LatticeError(f"class {gamma} is not positive")
            if lattice.ell(gamma) > self.truncation:
                raise LatticeError(f"class {gamma} exceeds truncation {self.truncation}")
            value = Fraction(value)
            if value:
                data[gamma] = data.get(gamma, Fraction(0)) + value
        self._entries = {g: v for g, v in data.items() if v}

    def __getitem__(self, gamma):
        return self._entries[as_class(gamma)]

    def get(self, gamma, default=Fraction(0)):
        return self._entries.get(as_class(gamma), default)

    def __iter__(self):
        return iter(self.sorted_classes())

    def __len__(self):
        return len(self._entries)

    def __eq__(self, other):
        if not isinstance(other, Spectrum):
            return NotImplemented
        return (self.kind == other.kind and self.lattice == other.lattice
                and self.truncation == other.truncation and self._entries == other._entries)

    def __repr__(self):
        body = ", ".join(f"{g}: {v}" for g, v in self.items())
        return f"Spectrum[{self.kind}, L={self.truncation}]({{{body}}})"

    def sorted_classes(self) -> list[ClassVector]:
        return sorted(self._entries, key=lambda g: (self.lattice.ell(g), g))

    def items(self):
        return [(g, self._entries[g]) for g in self.sorted_classes()]

    def restrict(self, truncation: int) -> "Spectrum":
        keep = {g: v for g, v in self._entries.items() if self.lattice.ell(g) <= truncation}
        return Spectrum(self.kind, self.lattice, truncation, keep)

    def with_entries(self, entries) -> "Spectrum":
        return Spectrum(self.kind, self.lattice, self.truncation, entries)


def _require_kind(S: Spectrum, kind: str) -> None:
    if S.kind != kind:
        raise LatticeError(f"expected a {kind} spectrum, got {S.kind}")


def omega_to_dtbar(S: Spectrum) -> Spectrum:
    """DTbar(beta) = sum over m | beta of Omega(beta/m) / m^2."""
    _require_kind(S, OMEGA)
    out: Dict[ClassVector, Fraction] = {}
    for gamma, value in S.items():
        base = S.lattice.ell(gamma)
        m = 1
        while m * base <= S.truncation:
            key = scale(m, gamma)
            out[key] = out.get(key, Fraction(0)) + value / (m * m)
            m += 1
    return Spectrum(DTBAR, S.lattice, S.truncation, out)


def dtbar_to_omega(S: Spectrum) -> Spectrum:
    """Moebius inversion of :func:`omega_to_dtbar`."""
    _require_kind(S, DTBAR)
    out: Dict[ClassVector, Fraction] = {}
    for gamma, value in S.items():
        base = S.lattice.ell(gamma)
        m = 1
        while m * base <= S.truncation:
            mu = mobius(m)
            if mu:
                key = scale(m, gamma)
                out[key] = out.get(key, Fraction(0)) + mu * value / (m * m)
            m += 1
    return Spectrum(OMEGA, S.lattice, S.truncation, out)


def _column_span_is_full(matrix: Sequence[Sequence[int]], rows: int) -> bool:
    """Does the integer column span of ``matrix`` equal Z^rows?

    Integer row-echelon form of the transpose; the span is everything iff the
    pivots are all +-1 and there are ``rows`` of them.
    """
    vecs = [list(col) for col in zip(*matrix)] if matrix and matrix[0] else []
    pivots = 0
    for c in range(rows):
        live = [v for v in vecs if v[c] != 0]
        rest = [v for v in vecs if v[c] == 0]
        while len(live) > 1:
            live.sort(key=lambda v: abs(v[c]))
            head = live[0]
            nxt = []
            for v in live[1:]:
                q = v[c] // head[c]
                w = [a - q * b for a, b in zip(v, head)]
                (nxt if w[c] != 0 else rest).append(w)
            live = [head] + nxt
        if not live:
            return False
        if abs(live[0][c]) != 1:
            return False
        pivots += 1
        vecs = rest
    return pivots == rows


@dataclass(frozen=True)
class LatticeMap:
    """Linear map source -> target given by a d_target x d_source integer matrix."""

    matrix: Tuple[Tuple[int, ...], ...]
    source: Lattice
    target: Lattice
    _cols: Tuple[Tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        rows = tuple(tuple(int(x) for x in row) for row in self.matrix)
        object.__setattr__(self, "matrix", rows)
        if len(rows) != self.target.rank or any(len(r) != self.source.rank for r in rows):
            raise LatticeError("map matrix shape does not match lattices")
        cols = tuple(zip(*rows))
        object.__setattr__(self, "_cols", cols)
        for col in cols:
            if not is_positive(col):
                raise LatticeError("map does not send basis vectors to positive classes")
        if not _column_span_is_full(rows, self.target.rank):
            raise LatticeError("map is not surjective onto the target lattice")

    def __call__(self, gamma: Sequence[int]) -> ClassVector:
        self.source.check(gamma)
        return tuple(sum(r[i] * gamma[i] for i in range(len(gamma))) for r in self.matrix)

    def preserves_truncation(self) -> bool:
        return all(self.target.ell(col) <= w for col, w in zip(self._cols, self.source.weights))


def pushforward(S: Spectrum, pi: LatticeMap) -> Spectrum:
    """(pi_* S)(alpha) = sum of S(beta) over stored beta with pi(beta) = alpha."""
    if S.lattice != pi.source:
        raise LatticeError("spectrum lattice is not the map's source")
    if not pi.preserves_truncation():
        raise LatticeError("map increases the truncation functional")
    out: Dict[ClassVector, Fraction] = {}
    for beta, value in S.items():
        alpha = pi(beta)
        out[alpha] = out.get(alpha, Fraction(0)) + value
    return Spectrum(S.kind, pi.target, S.truncation, out)
