"""Closed-form checks that do not go through the wall-crossing engine."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import comb
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

from .lattice import ClassVector, LatticeError, Spectrum, as_class, is_positive
from .quiver import build_standard


class OracleError(ValueError):
    pass


def _series_mul(a: List[Fraction], b: List[Fraction], n_max: int) -> List[Fraction]:
    out = [Fraction(0)] * (n_max + 1)
    for i, x in enumerate(a):
        if not x:
            continue
        for j in range(0, n_max + 1 - i):
            out[i + j] += x * b[j]
    return out


def _binomial_series(c: int, e: int, n_max: int) -> List[Fraction]:
    """(1 - c q)^e truncated, for any integer e."""
    out = [Fraction(0)] * (n_max + 1)
    coef = Fraction(1)
    for n in range(n_max + 1):
        out[n] = coef * (-c) ** n
        coef = coef * (e - n) / (n + 1)
    return out


def macmahon(chi: int, n_max: int) -> List[int]:
    """Coefficients of prod_k (1 - (-q)^k)^(-k chi) up to q^n_max."""
    if n_max < 0:
        raise OracleError("n_max must be non-negative")
    acc = [Fraction(1)] + [Fraction(0)] * n_max
    for k in range(1, n_max + 1):
        # (1 - (-1)^k q^k)^(-k chi): substitute q -> q^k into a binomial series
        base = _binomial_series((-1) ** k, -k * chi, n_max // k)
        factor = [Fraction(0)] * (n_max + 1)
        for i, c in enumerate(base):
            factor[i * k] = c
        acc = _series_mul(acc, factor, n_max)
    return [int(c) for c in acc]


def framed_rank1(chi: int, N: int, n_vec: Sequence[int]) -> int:
    """Torus fixed-point count for Omega^+_Q(1, n) on Q_{chi,N}, chi > 0.

    Each (j, k) contributes binom(n_jk + k - 1, k - 1) maps f with
    sum_p f(j,k,p) = n_jk, and the sign is (-1)^(sum k n_jk).
    """
    if chi <= 0:
        raise OracleError("framed_rank1 needs chi > 0")
    nodes = build_standard(chi, N).nodes
    n_vec = as_class(n_vec)
    if len(n_vec) != len(nodes):
        raise OracleError(f"expected {len(nodes)} entries, got {len(n_vec)}")
    if any(c < 0 for c in n_vec):
        raise OracleError("dimension vector entries must be non-negative")
    d = 0
    count = 1
    for (_, k), n in zip(nodes, n_vec):
        d += k * n
        count *= comb(n + k - 1, k - 1)
    return -count if d % 2 else count


@dataclass(frozen=True)
class OneLoopReport:
    passed: bool
    first_failure: Optional[int]
    lhs: Tuple[Fraction, ...]
    rhs: Tuple[Fraction, ...]


def _series_exp(a: List[Fraction], n_max: int) -> List[Fraction]:
    """exp of a series with zero constant term: n b_n = sum_k k a_k b_(n-k)."""
    b = [Fraction(1)] + [Fraction(0)] * n_max
    for n in range(1, n_max + 1):
        b[n] = sum((k * a[k] * b[n - k] for k in range(1, n + 1)), Fraction(0)) / n
    return b


def one_loop_identity(n_max: int, dtbar: Optional[Callable[[int], Fraction]] = None,
                      ndt: Optional[Callable[[int], Fraction]] = None) -> OneLoopReport:
    """Compare 1 + sum NDT(n) q^n with exp(-sum (-1)^n n DTbar(n) q^n) exactly.

    Defaults: NDT(n) = (-1)^n and DTbar(n) = -1/n^2.
    """
    dtbar = dtbar or (lambda n: Fraction(-1, n * n))
    ndt = ndt or (lambda n: Fraction((-1) ** n))
    lhs = [Fraction(1)] + [Fraction(ndt(n)) for n in range(1, n_max + 1)]
    expo = [Fraction(0)] + [-(-1) ** n * n * Fraction(dtbar(n)) for n in range(1, n_max + 1)]
    rhs = _series_exp(expo, n_max)
    first = next((n for n in range(n_max + 1) if lhs[n] != rhs[n]), None)
    return OneLoopReport(first is None, first, tuple(lhs), tuple(rhs))


def check_integrality(S: Union[Spectrum, Dict]) -> List[Tuple[ClassVector, Fraction]]:
    """Entries with denominator != 1; an empty list means the spectrum is integral."""
    items = S.items() if hasattr(S, "items") else S
    return [(g, Fraction(v)) for g, v in items if Fraction(v).denominator != 1]


@dataclass(frozen=True)
class SymmetryReport:
    violations: Tuple[Tuple[ClassVector, ClassVector, Fraction, Fraction], ...]
    tested: Tuple[ClassVector, ...]
    untested: Tuple[ClassVector, ...] = field(default=())

    @property
    def ok(self) -> bool:
        return not self.violations


def _as_map(involution) -> Callable[[ClassVector], ClassVector]:
    if callable(involution):
        return lambda g: as_class(involution(g))
    rows = tuple(tuple(int(x) for x in r) for r in involution)
    return lambda g: tuple(sum(a * b for a, b in zip(row, g)) for row in rows)


def check_symmetry(S: Spectrum, involution) -> SymmetryReport:
    """Check S(g) == S(iota g) for every support class whose partner is in truncation.

    Partners that leave the positive cone or exceed the truncation are reported
    as untested.  Classes off the support are covered through their partner.
    """
    iota = _as_map(involution)
    bad, tested, untested = [], [], []
    for g, v in S.items():
        h = iota(g)
        if len(h) != len(g):
            raise LatticeError("involution changes the lattice rank")
        if not is_positive(h) or S.lattice.ell(h) > S.truncation:
            untested.append(g)
            continue
        tested.append(g)
        w = S.get(h, 0)
        if Fraction(v) != Fraction(w):
            bad.append((g, h, Fraction(v), Fraction(w)))
    return SymmetryReport(tuple(bad), tuple(tested), tuple(untested))


def scan_real_roots(cartan_matrix: Sequence[Sequence[int]], bound: int) -> List[ClassVector]:
    """Every alpha > 0 with height <= bound and alpha^T C alpha = 2, by plain enumeration."""
    n = len(cartan_matrix)
    found = []
    for alpha in product(range(bound + 1), repeat=n):
        h = sum(alpha)
        if h == 0 or h > bound:
            continue
        q2 = sum(alpha[i] * cartan_matrix[i][j] * alpha[j] for i in range(n) for j in range(n))
        if q2 == 2:
            found.append(alpha)
    return sorted(found, key=lambda a: (sum(a), a))


def fiber_sums(chi: int, N: int, n_max: int) -> List[int]:
    """Sum of framed_rank1 over vectors with sum_k k n_jk = n; matches macmahon for n <= N."""
    ks = [k for _, k in build_standard(chi, N).nodes]
    out = [0] * (n_max + 1)

    def walk(i, used, vec):
        if i == len(ks):
            out[used] += framed_rank1(chi, N, vec)
            return
        for c in range((n_max - used) // ks[i] + 1):
            walk(i + 1, used + c * ks[i], vec + [c])

    walk(0, 0, [])
    return out
