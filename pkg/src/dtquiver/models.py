"""Initial spectra, lattices, pairings and chambers for the geometries we study.

Every framed model has coordinates (r, alpha) where r counts the framing
vertex ``inf``; its pairing is the antisymmetrized Euler form of the framed
quiver, in which only the framing arrow inf -> 0 survives.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .lattice import OMEGA, ClassVector, Lattice, LatticeMap, PairingForm, Spectrum, as_class
from .quiver import (Quiver, antisym_pairing, build_standard, d0d6_lattice, d0d6_pairing,
                     framed_quiver, reflection_matrix)
from .stability import CentralCharge

I = Fraction(1)


class ModelError(ValueError):
    pass


@dataclass(frozen=True)
class Model:
    """A lattice with pairing, an initial Omega spectrum and two central charges."""

    name: str
    lattice: Lattice
    pairing: PairingForm
    spectrum: Spectrum
    z_minus: CentralCharge
    z_plus: Optional[CentralCharge] = None
    quiver: Optional[Quiver] = None
    involution: Optional[Tuple[Tuple[int, ...], ...]] = None
    projection: Optional[LatticeMap] = None
    params: Dict[str, object] = field(default_factory=dict)


# -- D0-D6 ---------------------------------------------------------------

def d0d6_charges() -> Tuple[CentralCharge, CentralCharge]:
    """(Z-, Z+) on the (r, n) lattice: arg theta_r < arg theta_n in Z-, reversed in Z+."""
    z_minus = CentralCharge(((I, I), (0, I)))
    z_plus = CentralCharge(((-I, I), (0, I)))
    return z_minus, z_plus


def d0d6_minus(chi: int, L: int) -> Spectrum:
    """Omega(1,0) = 1, Omega(0,n) = -chi for n >= 1."""
    lattice = d0d6_lattice()
    entries = {(1, 0): 1}
    for n in range(1, L + 1):
        entries[(0, n)] = -chi
    return Spectrum(OMEGA, lattice, L, {g: v for g, v in entries.items() if lattice.ell(g) <= L})


def d0d6(chi: int, L: int) -> Model:
    z_minus, z_plus = d0d6_charges()
    return Model(f"d0d6(chi={chi})", d0d6_lattice(), d0d6_pairing(), d0d6_minus(chi, L),
                 z_minus, z_plus, involution=reflection_matrix(()), params={"chi": chi})


def _sign(x: int) -> int:
    return (x > 0) - (x < 0)


def quiver_minus(chi: int, N: int, L: Optional[int] = None) -> Spectrum:
    """Omega(e_0) = 1 and Omega(e_{j,k}) = -sgn(chi); nothing on multiples of e_{j,k}."""
    sq = build_standard(chi, N)
    L = N + 1 if L is None else L
    entries = {sq.lattice.basis(0): 1}
    for i in range(1, sq.lattice.rank):
        entries[sq.lattice.basis(i)] = -_sign(chi)
    return Spectrum(OMEGA, sq.lattice, L,
                    {g: v for g, v in entries.items() if sq.lattice.ell(g) <= L})


def standard_model(chi: int, N: int, L: Optional[int] = None) -> Model:
    """Q_{chi,N} with Z_Q = Z_X o pi."""
    sq = build_standard(chi, N)
    z_minus, z_plus = d0d6_charges()
    ks = [k for _, k in sq.nodes]
    return Model(f"Q_{{{chi},{N}}}", sq.lattice, sq.pairing, quiver_minus(chi, N, L),
                 z_minus.pullback(sq.pi_matrix), z_plus.pullback(sq.pi_matrix),
                 quiver=sq.quiver, involution=reflection_matrix(ks), projection=sq.projection,
                 params={"chi": chi, "N": N})


# -- framed three-vertex models ------------------------------------------

def conifold_quiver() -> Quiver:
    inner = Quiver((0, 1), ((0, 1), (0, 1), (1, 0), (1, 0)),
                   {"superpotential": "a1 b1 a2 b2 - a1 b2 a2 b1"})
    return framed_quiver(inner, 0, "conifold")


def zero_minus_two_quiver(N_pot: int) -> Quiver:
    inner = Quiver((0, 1), ((0, 1), (0, 1), (1, 0), (1, 0), (0, 0), (1, 1)),
                   {"superpotential": f"c0^{N_pot + 1}/{N_pot + 1} + c1^{N_pot + 1}/{N_pot + 1}"
                                      " + c0 (b1 a1 + b2 a2) + c1 (a1 b1 + a2 b2)"})
    return framed_quiver(inner, 0, f"(0,-2) curve, N={N_pot}")


def _framed_charges(rank_inner: int) -> Tuple[CentralCharge, CentralCharge]:
    """Z0: arg Z(e_inf) below the common phase of the others.  Z+: e_inf on top, the
    others spread slightly so that no two bound states share a phase."""
    z0 = CentralCharge(((I, I),) + ((0, I),) * rank_inner)
    spread = [Fraction((-1) ** k, 3 + 2 * k) for k in range(rank_inner)]
    zp = CentralCharge(((-I, I),) + tuple((s, I) for s in spread))
    return z0, zp


def conifold_center(bound: int) -> Model:
    """Omega(1,0,0)=1, Omega(0,n,n)=-2, Omega(0,n,n+1)=Omega(0,n+1,n)=1."""
    return _two_node_model("conifold", conifold_quiver(), bound, -2, 1, {})


def zero_minus_two_initial(N_pot: int, bound: int) -> Model:
    """As the conifold, but N_pot on (0,n,n+1) and (0,n+1,n)."""
    if N_pot <= 1:
        raise ModelError("the (0,-2) model needs N > 1")
    return _two_node_model(f"zero_minus_two(N={N_pot})", zero_minus_two_quiver(N_pot), bound,
                           -2, N_pot, {"N": N_pot})


def _two_node_model(name, Q, bound, diag, offdiag, params) -> Model:
    lattice = Lattice(3)
    entries = {(1, 0, 0): 1}
    for n in range(0, bound + 1):
        if n > 0:
            entries[(0, n, n)] = diag
        entries[(0, n, n + 1)] = offdiag
        entries[(0, n + 1, n)] = offdiag
    S = Spectrum(OMEGA, lattice, bound, {g: v for g, v in entries.items() if sum(g) <= bound})
    z0, zp = _framed_charges(2)
    inv = ((-1, 1, 0), (0, 1, 0), (0, 0, 1))
    return Model(name, lattice, antisym_pairing(Q), S, z0, zp, quiver=Q, involution=inv,
                 params=params)


# -- affine root data -------------------------------------------------------

@dataclass(frozen=True)
class CartanData:
    """Affine simply-laced Cartan matrix and its minimal imaginary root."""

    matrix: Tuple[Tuple[int, ...], ...]
    delta: ClassVector
    name: str = ""

    def __post_init__(self):
        m = tuple(tuple(int(x) for x in row) for row in self.matrix)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "delta", as_class(self.delta))
        n = len(m)
        if any(len(row) != n for row in m) or len(self.delta) != n:
            raise ModelError("Cartan matrix must be square and match delta")
        for i in range(n):
            if m[i][i] != 2:
                raise ModelError("Cartan diagonal entries must be 2")
            for j in range(n):
                if m[i][j] != m[j][i]:
                    raise ModelError("Cartan matrix must be symmetric")
        if any(sum(m[i][j] * self.delta[j] for j in range(n)) for i in range(n)):
            raise ModelError("delta is not in the kernel of the Cartan matrix")

    @property
    def rank(self) -> int:
        return len(self.matrix)


def _cartan_from_edges(n: int, edges: Sequence[Tuple[int, int]], delta, name) -> CartanData:
    m = [[2 if i == j else 0 for j in range(n)] for i in range(n)]
    for a, b in edges:
        m[a][b] -= 1
        m[b][a] -= 1
    return CartanData(tuple(map(tuple, m)), tuple(delta), name)


def affine_cartan(kind: str, n: int = 0) -> CartanData:
    """Affine A_n (n>=1), D_n (n>=4), E6, E7, E8; node 0 is the extending node."""
    kind = kind.upper()
    if kind == "A":
        if n < 1:
            raise ModelError("affine A_n needs n >= 1")
        if n == 1:
            return CartanData(((2, -2), (-2, 2)), (1, 1), "A1~")
        return _cartan_from_edges(n + 1, [(k, (k + 1) % (n + 1)) for k in range(n + 1)],
                                  (1,) * (n + 1), f"A{n}~")
    if kind == "D":
        if n < 4:
            raise ModelError("affine D_n needs n >= 4")
        edges = [(0, 2), (1, 2)] + [(k, k + 1) for k in range(2, n - 2)] + [(n - 2, n - 1), (n - 2, n)]
        delta = (1, 1) + (2,) * (n - 3) + (1, 1)
        return _cartan_from_edges(n + 1, edges, delta, f"D{n}~")
    if kind in ("E6", "E") and (kind == "E6" or n == 6):
        edges = [(0, 1), (1, 2), (2, 3), (3, 4), (2, 5), (5, 6)]
        return _cartan_from_edges(7, edges, (1, 2, 3, 2, 1, 2, 1), "E6~")
    if kind in ("E7", "E") and (kind == "E7" or n == 7):
        edges = [(k, k + 1) for k in range(6)] + [(3, 7)]
        return _cartan_from_edges(8, edges, (1, 2, 3, 4, 3, 2, 1, 2), "E7~")
    if kind in ("E8", "E") and (kind == "E8" or n == 8):
        edges = [(k, k + 1) for k in range(7)] + [(5, 8)]
        return _cartan_from_edges(9, edges, (1, 2, 3, 4, 5, 6, 4, 2, 3), "E8~")
    raise ModelError(f"unknown affine type {kind}{n or ''}")


def tits_form(C: CartanData, alpha: Sequence[int]) -> int:
    """q(alpha) = alpha^T C alpha / 2."""
    n = C.rank
    if len(alpha) != n:
        raise ModelError("root vector length does not match the Cartan matrix")
    total = sum(alpha[i] * C.matrix[i][j] * alpha[j] for i in range(n) for j in range(n))
    return total // 2


def real_roots(C: CartanData, bound: int, max_roots: int = 1_000_000) -> List[ClassVector]:
    """Positive real roots (q = 1) with height <= bound, ordered by (height, lex).

    Breadth-first from the simple roots, adding one simple root at a time and
    staying inside {q <= 1}; every positive root is reached this way.
    """
    n = C.rank
    simple = [tuple(1 if j == i else 0 for j in range(n)) for i in range(n)]
    seen = set(simple)
    queue = deque(simple)
    while queue:
        a = queue.popleft()
        if sum(a) >= bound:
            continue
        for i in range(n):
            b = a[:i] + (a[i] + 1,) + a[i + 1:]
            if b not in seen and tits_form(C, b) <= 1:
                seen.add(b)
                if len(seen) > max_roots:
                    raise ModelError(f"more than {max_roots} roots below height {bound}")
                queue.append(b)
    roots = [a for a in seen if tits_form(C, a) == 1]
    return sorted(roots, key=lambda a: (sum(a), a))


def imaginary_roots(C: CartanData, bound: int) -> List[ClassVector]:
    h = sum(C.delta)
    return [tuple(m * c for c in C.delta) for m in range(1, bound // h + 1)]


# -- sigma words and the toric small resolutions ------------------------------

@dataclass(frozen=True)
class SigmaWord:
    """Signs sigma(1/2), ..., sigma(L - 1/2), stored as +1 / -1."""

    signs: Tuple[int, ...]

    def __post_init__(self):
        signs = self.signs
        if isinstance(signs, str):
            signs = tuple(+1 if ch == "+" else -1 if ch == "-" else 0 for ch in signs)
        signs = tuple(int(s) for s in signs)
        if any(s not in (1, -1) for s in signs):
            raise ModelError("sigma words use only '+' and '-'")
        if len(signs) < 2:
            raise ModelError("sigma words need length L >= 2")
        object.__setattr__(self, "signs", signs)

    @property
    def length(self) -> int:
        return len(self.signs)

    @property
    def counts(self) -> Tuple[int, int]:
        """(L_+, L_-)."""
        return self.signs.count(1), self.signs.count(-1)

    def loop_vertices(self) -> Tuple[int, ...]:
        """k with sigma(k - 1/2) = sigma(k + 1/2), indices mod L."""
        L = self.length
        return tuple(k for k in range(L) if self.signs[(k - 1) % L] == self.signs[k])

    def __str__(self):
        return "".join("+" if s > 0 else "-" for s in self.signs)


def epsilon(sigma: SigmaWord, alpha: Sequence[int]) -> int:
    """Sum of alpha_k over vertices k without a loop."""
    loops = set(sigma.loop_vertices())
    return sum(c for k, c in enumerate(alpha) if k not in loops)


def _double(C: CartanData) -> List[Tuple[int, int]]:
    arrows = []
    n = C.rank
    for i in range(n):
        for j in range(n):
            if i != j and C.matrix[i][j] < 0:
                arrows.extend([(i, j)] * (-C.matrix[i][j]))
    return arrows


def affine_a_quiver(sigma: SigmaWord) -> Quiver:
    C = affine_cartan("A", sigma.length - 1)
    arrows = _double(C) + [(k, k) for k in sigma.loop_vertices()]
    inner = Quiver(tuple(range(sigma.length)), tuple(arrows), {"sigma": str(sigma)})
    return framed_quiver(inner, 0, f"toric small resolution sigma={sigma}")


def mckay_quiver(C: CartanData) -> Quiver:
    arrows = _double(C) + [(k, k) for k in range(C.rank)]
    inner = Quiver(tuple(range(C.rank)), tuple(arrows), {"type": C.name})
    return framed_quiver(inner, 0, f"McKay {C.name}")


def _framed_root_model(name, Q, C: CartanData, bound, imaginary, real_value, params) -> Model:
    n = C.rank
    lattice = Lattice(1 + n)
    entries: Dict[ClassVector, object] = {(1,) + (0,) * n: 1}
    for a in imaginary_roots(C, bound):
        entries[(0,) + a] = imaginary
    for a in real_roots(C, bound):
        entries[(0,) + a] = real_value(a)
    S = Spectrum(OMEGA, lattice, bound, {g: v for g, v in entries.items() if sum(g) <= bound})
    z0, zp = _framed_charges(n)
    return Model(name, lattice, antisym_pairing(Q), S, z0, zp, quiver=Q, params=params)


def affineA_initial(sigma: SigmaWord, bound: int) -> Model:
    """Omega(1,0)=1, Omega(0,n delta)=-L, Omega(0,alpha)=(-1)^epsilon(alpha) on real roots."""
    if not isinstance(sigma, SigmaWord):
        sigma = SigmaWord(sigma)
    C = affine_cartan("A", sigma.length - 1)
    return _framed_root_model(f"affineA(sigma={sigma})", affine_a_quiver(sigma), C, bound,
                              -sigma.length, lambda a: (-1) ** epsilon(sigma, a),
                              {"sigma": str(sigma)})


def mckay_initial(C: CartanData, bound: int) -> Model:
    """Omega(1,0)=1, Omega(0,n delta)=-|I_G|, Omega(0,alpha)=-1 on real roots."""
    return _framed_root_model(f"mckay({C.name})", mckay_quiver(C), C, bound, -C.rank,
                              lambda a: -1, {"type": C.name})


GENERATORS = ("d0d6", "standard", "conifold", "affineA", "mckay", "zero_minus_two")


def generate(name: str, bound: int, **params) -> Model:
    """Named model lookup used by the CLI."""
    if name == "d0d6":
        return d0d6(int(params.get("chi", 1)), bound)
    if name == "standard":
        return standard_model(int(params.get("chi", 1)), int(params.get("N", bound)), bound)
    if name == "conifold":
        return conifold_center(bound)
    if name == "affineA":
        return affineA_initial(SigmaWord(str(params.get("sigma", "+-"))), bound)
    if name == "mckay":
        kind = str(params.get("type", "A1"))
        letter, rest = kind[0], kind[1:]
        if letter.upper() == "E":
            C = affine_cartan("E" + rest)
        else:
            C = affine_cartan(letter, int(rest))
        return mckay_initial(C, bound)
    if name == "zero_minus_two":
        return zero_minus_two_initial(int(params.get("N", 2)), bound)
    raise ModelError(f"unknown generator {name!r}; choose from {', '.join(GENERATORS)}")
