"""Exact central charges, phase order, rays and genericity checks."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key
from typing import List, Optional, Sequence, Tuple

from .lattice import ClassVector, Lattice, LatticeError, PairingForm, as_class, is_positive, pair

Complex = Tuple[Fraction, Fraction]

LESS, EQUAL, GREATER = -1, 0, 1


class NonGenericStability(ValueError):
    """Equal-phase classes with nonzero pairing."""

    def __init__(self, violations):
        self.violations = list(violations)
        shown = ", ".join(f"{g}~{m}" for g, m in self.violations[:5])
        super().__init__(f"central charge is not generic: {shown}")


def parse_complex(text: str) -> Complex:
    """``"re,im"`` with each part an integer or ``p/q``."""
    parts = [p.strip() for p in str(text).split(",")]
    if len(parts) != 2:
        raise ValueError(f"expected 're,im', got {text!r}")
    return Fraction(parts[0]), Fraction(parts[1])


def format_complex(z: Complex) -> str:
    return f"{z[0]},{z[1]}"


@dataclass(frozen=True)
class CentralCharge:
    """Z(e_i) for each basis vector; every value in the open upper half plane."""

    values: Tuple[Complex, ...]

    def __post_init__(self):
        vals = []
        for z in self.values:
            if isinstance(z, str):
                z = parse_complex(z)
            re, im = (Fraction(z[0]), Fraction(z[1]))
            if im <= 0:
                raise ValueError(f"central charge value {re}+{im}i is not in the upper half plane")
            vals.append((re, im))
        object.__setattr__(self, "values", tuple(vals))

    @classmethod
    def from_strings(cls, items: Sequence[str]) -> "CentralCharge":
        return cls(tuple(parse_complex(s) for s in items))

    @property
    def rank(self) -> int:
        return len(self.values)

    def __call__(self, gamma: Sequence[int]) -> Complex:
        return evaluate(self, gamma)

    def pullback(self, matrix: Sequence[Sequence[int]]) -> "CentralCharge":
        """Z o pi for pi given as a target x source integer matrix."""
        cols = list(zip(*matrix))
        return CentralCharge(tuple(_linear(self, col) for col in cols))


def _linear(Z: CentralCharge, gamma: Sequence[int]) -> Complex:
    re = sum((c * z[0] for c, z in zip(gamma, Z.values)), Fraction(0))
    im = sum((c * z[1] for c, z in zip(gamma, Z.values)), Fraction(0))
    return re, im


def evaluate(Z: CentralCharge, gamma: Sequence[int]) -> Complex:
    if len(gamma) != Z.rank:
        raise LatticeError("dimension mismatch between class and central charge")
    if not is_positive(gamma):
        raise LatticeError(f"class {tuple(gamma)} is not positive")
    return _linear(Z, gamma)


def _compare_values(a: Complex, b: Complex) -> int:
    cross = a[0] * b[1] - b[0] * a[1]
    if cross > 0:
        return LESS
    if cross < 0:
        return GREATER
    return EQUAL


def phase_compare(Z: CentralCharge, gamma: Sequence[int], mu: Sequence[int]) -> int:
    """Sign of arg Z(gamma) - arg Z(mu) as LESS / EQUAL / GREATER."""
    return _compare_values(evaluate(Z, gamma), evaluate(Z, mu))


@dataclass(frozen=True)
class Ray:
    witness: ClassVector
    members: Tuple[ClassVector, ...]


def rays(Z: CentralCharge, classes: Sequence[Sequence[int]],
         lattice: Optional[Lattice] = None) -> List[Ray]:
    """Group classes by phase, strictly decreasing phase order."""
    ell = lattice.ell if lattice is not None else sum
    items = sorted({as_class(c) for c in classes}, key=lambda g: (ell(g), g))
    z = {g: evaluate(Z, g) for g in items}
    ordered = sorted(items, key=cmp_to_key(lambda g, m: -_compare_values(z[g], z[m])))
    out: List[List[ClassVector]] = []
    for g in ordered:
        if out and _compare_values(z[out[-1][0]], z[g]) == EQUAL:
            out[-1].append(g)
        else:
            out.append([g])
    result = []
    for group in out:
        group.sort(key=lambda g: (ell(g), g))
        result.append(Ray(group[0], tuple(group)))
    return result


def validate_generic(Z: CentralCharge, P: PairingForm, classes: Sequence[Sequence[int]],
                     mode: str = "isotropy") -> List[Tuple[ClassVector, ClassVector]]:
    """Return the offending pairs; an empty list means the check passed.

    ``isotropy``: equal phase must imply zero pairing.
    ``ordering``: positive pairing <g, m> must imply arg Z(g) < arg Z(m).
    """
    if mode not in ("isotropy", "ordering"):
        raise ValueError(f"unknown genericity mode {mode!r}")
    items = sorted({as_class(c) for c in classes})
    z = {g: evaluate(Z, g) for g in items}
    bad = []
    for i, g in enumerate(items):
        for m in items[i + 1:]:
            p = pair(P, g, m)
            if p == 0:
                continue
            cmp = _compare_values(z[g], z[m])
            if mode == "isotropy":
                if cmp == EQUAL:
                    bad.append((g, m))
            elif p > 0 and cmp != LESS or p < 0 and cmp != GREATER:
                bad.append((g, m))
    return bad


def require_generic(Z: CentralCharge, P: PairingForm, classes) -> None:
    bad = validate_generic(Z, P, classes)
    if bad:
        raise NonGenericStability(bad)
