"""Wall-crossing by ordered factorization in a truncated Poisson torus.

A spectrum of DTbar values at a central charge Z is turned into a unipotent
automorphism: one Hamiltonian flow per ray, composed in phase order.  Crossing
walls means re-factorizing that automorphism in the phase order of a second
central charge, one degree at a time.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Optional, Sequence, Tuple

from .lattice import (DTBAR, OMEGA, ClassVector, Lattice, LatticeError, PairingForm, Spectrum,
                      dtbar_to_omega, omega_to_dtbar, pair, sub)
from .series import MonomialBasis, TruncatedSeries
from .stability import CentralCharge, NonGenericStability, rays, require_generic


class EngineError(RuntimeError):
    pass


class NonHamiltonianResidual(EngineError):
    """The leading part of a residual automorphism is not a Hamiltonian derivation."""


class TruncationTooSmall(EngineError):
    """A residual that should be trivial below some degree is not."""


@dataclass(frozen=True)
class Convention:
    """Sign twist of the bracket and the composition order of ray flows.

    ``decreasing_last``: the ray of largest phase is applied last (leftmost).
    """

    twisted: bool = True
    decreasing_last: bool = True


# Frozen by calibration against the MacMahon series (see ``calibrate``).
DEFAULT_CONVENTION = Convention(twisted=True, decreasing_last=True)


def bracket(gamma: Sequence[int], mu: Sequence[int], P: PairingForm, twisted: bool = True) -> int:
    p = pair(P, gamma, mu)
    if twisted and p % 2:
        return -p
    return p


@lru_cache(maxsize=64)
def _basis(lattice: Lattice, pairing: PairingForm, level: int, twisted: bool) -> MonomialBasis:
    return MonomialBasis(lattice, pairing, level, twisted)


def algebra(lattice: Lattice, pairing: PairingForm, L: int,
            convention: Convention = DEFAULT_CONVENTION) -> MonomialBasis:
    """Operator algebra for spectra truncated at L.

    Reading a degree-L Hamiltonian off x^(g + e_i) needs L + w_i, hence the margin.
    """
    return _basis(lattice, pairing, L + max(lattice.weights), convention.twisted)


class GradedAutomorphism:
    """Unipotent automorphism stored by the images of the generators x^(e_i).

    ``provenance`` (when known) lists Hamiltonians h_1, ..., h_k with
    A = exp(h_1) o ... o exp(h_k); it makes inversion and application cheap.
    """

    __slots__ = ("basis", "images", "provenance")

    def __init__(self, basis: MonomialBasis, images: Sequence[TruncatedSeries],
                 provenance: Optional[Tuple[TruncatedSeries, ...]] = None):
        if len(images) != basis.lattice.rank:
            raise LatticeError("need one image per generator")
        self.basis = basis
        self.images = tuple(images)
        self.provenance = None if provenance is None else tuple(provenance)

    @classmethod
    def identity(cls, basis: MonomialBasis) -> "GradedAutomorphism":
        return cls(basis, [basis.generator(i) for i in range(basis.lattice.rank)], ())

    @property
    def level(self) -> int:
        return self.basis.level

    def __eq__(self, other):
        if not isinstance(other, GradedAutomorphism):
            return NotImplemented
        return self.basis.compatible(other.basis) and self.images == other.images

    def __call__(self, s: TruncatedSeries) -> TruncatedSeries:
        return apply(self, s)

    def is_identity(self) -> bool:
        return all(img == self.basis.generator(i) for i, img in enumerate(self.images))

    def residuals(self) -> list:
        return [img - self.basis.generator(i) for i, img in enumerate(self.images)]

    def truncated_images(self, max_rise: int) -> list:
        """Generator images keeping only terms that rise at most ``max_rise`` in weight."""
        weights = self.basis.lattice.weights
        ell = self.basis.ell
        out = []
        for w, img in zip(weights, self.images):
            keep = {k: v for k, v in img.num.items() if ell[k] - w <= max_rise}
            out.append(TruncatedSeries._raw(self.basis, keep, img.den))
        return out

    def agrees(self, other: "GradedAutomorphism", max_rise: int) -> bool:
        """Equality of the images up to a rise of ``max_rise``.

        With unequal weights the top of the algebra also holds terms produced
        by classes beyond the truncation, so comparisons stop at ``max_rise``.
        """
        _check_same(self, other)
        return self.truncated_images(max_rise) == other.truncated_images(max_rise)


def _check_same(A: GradedAutomorphism, B: GradedAutomorphism) -> None:
    if not A.basis.compatible(B.basis):
        raise EngineError("automorphisms act on different truncated algebras (level mismatch)")


def flow(h: TruncatedSeries) -> GradedAutomorphism:
    """exp of the Hamiltonian derivation of h; h must be supported on an isotropic set."""
    basis = h.basis
    support = h.support()
    if any(not any(g) for g in support):
        raise EngineError("Hamiltonian has a constant term")
    P = basis.pairing
    for i, g in enumerate(support):
        for m in support[i + 1:]:
            if pair(P, g, m):
                raise NonGenericStability([(g, m)])
    images = [h.exp_flow(basis.generator(i)) for i in range(basis.lattice.rank)]
    return GradedAutomorphism(basis, images, (h,))


def _twist_sign(basis: MonomialBasis, mu: Sequence[int]) -> int:
    """x^mu = sign * x^(mu_1 e_1) ... x^(mu_d e_d) in the twisted algebra."""
    if not basis.twisted:
        return 1
    M = basis.pairing.matrix
    d = len(mu)
    e = sum(mu[i] * mu[j] * M[i][j] for i in range(d) for j in range(i + 1, d))
    return -1 if e % 2 else 1


def _apply_multiplicative(A: GradedAutomorphism, s: TruncatedSeries) -> TruncatedSeries:
    basis = A.basis
    one = TruncatedSeries.monomial(basis, (0,) * basis.lattice.rank)
    powers = [[one] for _ in range(basis.lattice.rank)]

    def power(i, k):
        row = powers[i]
        while len(row) <= k:
            row.append(row[-1] * A.images[i])
        return row[k]

    total = TruncatedSeries.zero(basis)
    for mu, c in s.terms().items():
        img = TruncatedSeries.monomial(basis, (0,) * basis.lattice.rank, c * _twist_sign(basis, mu))
        for i, k in enumerate(mu):
            if k:
                img = img * power(i, k)
        total = total + img
    return total


def apply(A: GradedAutomorphism, s: TruncatedSeries) -> TruncatedSeries:
    """A(s): flows in sequence when the provenance is known, else multiplicative extension."""
    if not A.basis.compatible(s.basis):
        raise EngineError("series and automorphism live in different algebras")
    if A.provenance is not None:
        return _run_flows(A.provenance, s)
    return _apply_multiplicative(A, s)


def _run_flows(hams: Sequence[TruncatedSeries], s: TruncatedSeries) -> TruncatedSeries:
    for h in reversed(hams):
        s = h.exp_flow(s)
    return s


def compose(A: GradedAutomorphism, B: GradedAutomorphism) -> GradedAutomorphism:
    """A after B."""
    _check_same(A, B)
    images = [apply(A, img) for img in B.images]
    prov = None
    if A.provenance is not None and B.provenance is not None:
        prov = A.provenance + B.provenance
    return GradedAutomorphism(A.basis, images, prov)


def invert(A: GradedAutomorphism) -> GradedAutomorphism:
    basis = A.basis
    if A.provenance is not None:
        prov = tuple(-h for h in reversed(A.provenance))
        images = [_run_flows(prov, basis.generator(i)) for i in range(basis.lattice.rank)]
        return GradedAutomorphism(basis, images, prov)
    # A^-1 = sum_k (id - A)^k, finite because id - A raises degree
    images = []
    for i in range(basis.lattice.rank):
        term = basis.generator(i)
        total = term
        for _ in range(basis.level + 1):
            term = term - _apply_multiplicative(A, term)
            if not term:
                break
            total = total + term
        else:
            raise EngineError("automorphism is not unipotent")
        images.append(total)
    return GradedAutomorphism(basis, images, None)


def log_derivation(A: GradedAutomorphism, degree: int) -> Dict[ClassVector, Fraction]:
    """Hamiltonian coefficients of the degree-``degree`` part of log A.

    A must be the identity below ``degree``; then that part of log A equals the
    degree part of A - id.  Coefficients are read off every generator with a
    nonzero bracket and must agree.  Classes pairing to zero with the whole
    lattice are invisible here and never appear in the result.
    """
    basis = A.basis
    lattice = basis.lattice
    P = basis.pairing
    twisted = basis.twisted
    found: Dict[ClassVector, Fraction] = {}
    seen_from: Dict[ClassVector, int] = {}
    residuals = A.residuals()
    for i, res in enumerate(residuals):
        w = lattice.weights[i]
        e_i = lattice.basis(i)
        for nu, c in res.terms().items():
            rise = lattice.ell(nu) - w
            if rise < degree:
                raise TruncationTooSmall(
                    f"residual is not trivial below degree {degree}: x^{e_i} -> ... + {c} x^{nu}")
            if rise > degree:
                continue
            gamma = sub(nu, e_i)
            if any(x < 0 for x in gamma):
                raise NonHamiltonianResidual(f"term x^{nu} in the image of x^{e_i} is not Hamiltonian")
            b = bracket(gamma, e_i, P, twisted)
            if b == 0:
                raise NonHamiltonianResidual(
                    f"x^{nu} appears in the image of x^{e_i} although <{gamma}, e_{i}> = 0")
            value = c / b
            if gamma in found and found[gamma] != value:
                raise NonHamiltonianResidual(
                    f"class {gamma}: generator {seen_from[gamma]} gives {found[gamma]}, "
                    f"generator {i} gives {value}")
            found.setdefault(gamma, value)
            seen_from.setdefault(gamma, i)
    # the extracted Hamiltonian must reproduce every degree part exactly
    h = TruncatedSeries(basis, found)
    for i, res in enumerate(residuals):
        expected = h.derive(basis.generator(i))
        actual = res.graded_part(lattice.weights[i] + degree)
        if expected != actual:
            raise NonHamiltonianResidual(f"generator {i}: residual is not a Hamiltonian derivation")
    return dict(sorted(found.items(), key=lambda kv: (lattice.ell(kv[0]), kv[0])))


def _hamiltonian(basis: MonomialBasis, S: Spectrum, members) -> TruncatedSeries:
    return TruncatedSeries(basis, {g: S[g] for g in members})


def ordered_product(Z: CentralCharge, S: Spectrum, P: PairingForm, L: Optional[int] = None,
                    convention: Convention = DEFAULT_CONVENTION) -> GradedAutomorphism:
    """Product of ray flows of a DTbar spectrum in the phase order of Z."""
    if S.kind != DTBAR:
        raise LatticeError("ordered_product needs a DTbar spectrum")
    L = S.truncation if L is None else L
    if L > S.truncation:
        raise LatticeError("requested level exceeds the spectrum truncation")
    S = S.restrict(L)
    basis = algebra(S.lattice, P, L, convention)
    classes = list(S)
    require_generic(Z, P, classes)
    hams = [_hamiltonian(basis, S, ray.members) for ray in rays(Z, classes, S.lattice)]
    if not convention.decreasing_last:
        hams.reverse()
    hams = [h for h in hams if h]
    images = [_run_flows(hams, basis.generator(i)) for i in range(S.lattice.rank)]
    return GradedAutomorphism(basis, images, tuple(hams))


def factorize(B: GradedAutomorphism, Z_target: CentralCharge, P: PairingForm, L: int,
              fallback: Optional[Spectrum] = None,
              convention: Convention = DEFAULT_CONVENTION, verify: bool = True) -> Spectrum:
    """The DTbar spectrum whose ordered product at Z_target equals B.

    Invisible classes (zero pairing with the whole lattice) cannot be seen by B
    and are copied from ``fallback``.
    """
    lattice = B.basis.lattice
    if B.basis.level != algebra(lattice, P, L, convention).level:
        raise EngineError("automorphism level does not match truncation L")
    if B.basis.twisted != convention.twisted:
        raise EngineError("automorphism was built with a different bracket convention")
    found: Dict[ClassVector, Fraction] = {}
    for d in range(1, L + 1):
        current = Spectrum(DTBAR, lattice, L, found)
        C = compose(invert(ordered_product(Z_target, current, P, L, convention)), B)
        found.update(log_derivation(C, d))
    if fallback is not None:
        for g, v in fallback.items():
            if lattice.ell(g) <= L and P.is_invisible(g):
                found[g] = v
    result = Spectrum(DTBAR, lattice, L, found)
    if verify and not ordered_product(Z_target, result, P, L, convention).agrees(B, L):
        raise EngineError("factorization does not reproduce the automorphism")
    return result


@dataclass(frozen=True)
class WallCrossing:
    omega_minus: Spectrum
    dtbar_minus: Spectrum
    omega_plus: Spectrum
    dtbar_plus: Spectrum


def wall_cross_full(S_minus: Spectrum, Z_minus: CentralCharge, Z_plus: CentralCharge,
                    P: PairingForm, L: Optional[int] = None,
                    convention: Convention = DEFAULT_CONVENTION) -> WallCrossing:
    if S_minus.kind != OMEGA:
        raise LatticeError("wall_cross needs an Omega spectrum")
    L = S_minus.truncation if L is None else L
    S_minus = S_minus.restrict(L)
    dt_minus = omega_to_dtbar(S_minus)
    B = ordered_product(Z_minus, dt_minus, P, L, convention)
    dt_plus = factorize(B, Z_plus, P, L, fallback=dt_minus, convention=convention)
    return WallCrossing(S_minus, dt_minus, dtbar_to_omega(dt_plus), dt_plus)


def wall_cross(S_minus: Spectrum, Z_minus: CentralCharge, Z_plus: CentralCharge,
               P: PairingForm, L: Optional[int] = None,
               convention: Convention = DEFAULT_CONVENTION) -> Spectrum:
    """Omega at Z_plus from Omega at Z_minus."""
    return wall_cross_full(S_minus, Z_minus, Z_plus, P, L, convention).omega_plus


def calibrate(L: int = 3) -> list:
    """Conventions reproducing Omega+(1,1) = -chi and Omega+(1,2) = [q^2] M(-q)^chi, chi = +-1."""
    from . import models, oracle

    passing = []
    for twisted in (True, False):
        for decreasing_last in (True, False):
            conv = Convention(twisted, decreasing_last)
            ok = True
            for chi in (1, -1):
                model = models.d0d6(chi, L)
                try:
                    out = wall_cross(model.spectrum, model.z_minus, model.z_plus, model.pairing,
                                     L, conv)
                except EngineError:
                    ok = False
                    break
                series = oracle.macmahon(chi, 2)
                if out.get((1, 1)) != -chi or out.get((1, 2)) != series[2]:
                    ok = False
                    break
            if ok:
                passing.append(conv)
    return passing
