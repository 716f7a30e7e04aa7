"""Quivers, Euler forms and the quiver constructions used for D0-D6 and BPS counting."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from itertools import product
from typing import Dict, Hashable, List, Mapping, Optional, Sequence, Tuple

from .lattice import (ClassVector, Lattice, LatticeError, LatticeMap, PairingForm,
                      Spectrum, as_class, is_positive, pair, sub)

Vertex = Hashable
Arrow = Tuple[Vertex, Vertex]


class QuiverError(ValueError):
    pass


class EnumerationLimit(QuiverError):
    """Too many lattice points below the target class."""


@dataclass(frozen=True)
class Quiver:
    """Vertices in a fixed order plus a multiset of arrows (loops allowed)."""

    vertices: Tuple[Vertex, ...]
    arrows: Tuple[Arrow, ...] = ()
    metadata: Mapping[str, object] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        verts = tuple(self.vertices)
        if len(set(verts)) != len(verts):
            raise QuiverError("vertex labels must be unique")
        known = set(verts)
        for s, t in self.arrows:
            if s not in known or t not in known:
                raise QuiverError(f"arrow {s}->{t} has an unknown endpoint")
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "arrows", tuple(self.arrows))

    def index(self, v: Vertex) -> int:
        return self.vertices.index(v)

    @property
    def loops(self) -> List[Arrow]:
        return [a for a in self.arrows if a[0] == a[1]]

    @property
    def proper_arrows(self) -> List[Arrow]:
        return [a for a in self.arrows if a[0] != a[1]]

    def arrow_counts(self) -> Counter:
        return Counter(self.arrows)

    def lattice(self, weights: Sequence[int] = ()) -> Lattice:
        return Lattice(len(self.vertices), tuple(weights))

    def euler_form(self, alpha: Sequence[int], beta: Sequence[int]) -> int:
        return euler_form(self, alpha, beta)

    def antisym_pairing(self) -> PairingForm:
        return antisym_pairing(self)


def euler_form(Q: Quiver, alpha: Sequence[int], beta: Sequence[int]) -> int:
    """sum_v a_v b_v - sum over arrows s->t of a_s b_t."""
    n = len(Q.vertices)
    if len(alpha) != n or len(beta) != n:
        raise LatticeError("dimension vector length does not match the quiver")
    pos = {v: i for i, v in enumerate(Q.vertices)}
    total = sum(a * b for a, b in zip(alpha, beta))
    for s, t in Q.arrows:
        total -= alpha[pos[s]] * beta[pos[t]]
    return total


def antisym_pairing(Q: Quiver) -> PairingForm:
    """<a, b> = chi(b, a) - chi(a, b); an arrow s->t adds +1 at (s, t)."""
    n = len(Q.vertices)
    pos = {v: i for i, v in enumerate(Q.vertices)}
    m = [[0] * n for _ in range(n)]
    for s, t in Q.arrows:
        i, j = pos[s], pos[t]
        m[i][j] += 1
        m[j][i] -= 1
    return PairingForm(tuple(tuple(r) for r in m))


def opposite(Q: Quiver) -> Quiver:
    return Quiver(Q.vertices, tuple((t, s) for s, t in Q.arrows), dict(Q.metadata))


@dataclass(frozen=True)
class StandardQuiver:
    """The framed quiver Q_{chi,N} with its lattice data and the map to (r, n)."""

    chi: int
    N: int
    quiver: Quiver
    lattice: Lattice
    pairing: PairingForm
    pi_matrix: Tuple[Tuple[int, ...], ...]
    projection: Optional[LatticeMap]

    @property
    def nodes(self) -> List[Tuple[int, int]]:
        """The (j, k) vertices in lattice order (after the vertex 0)."""
        return list(self.quiver.vertices[1:])


def d0d6_lattice() -> Lattice:
    return Lattice(2, (1, 1))


def d0d6_pairing() -> PairingForm:
    """<(r,n),(r',n')> = r n' - r' n."""
    return PairingForm(((0, 1), (-1, 0)))


def build_standard(chi: int, N: int) -> StandardQuiver:
    """Vertex 0 plus (j, k), 1<=j<=|chi|, 1<=k<=N; k arrows 0->(j,k), a loop at (j,k) iff chi>0."""
    if N < 1:
        raise QuiverError("N must be a positive integer")
    nodes = [(j, k) for j in range(1, abs(chi) + 1) for k in range(1, N + 1)]
    zero = (0,)
    arrows: List[Arrow] = []
    for j, k in nodes:
        arrows.extend([(zero, (j, k))] * k)
    if chi > 0:
        arrows.extend(((j, k), (j, k)) for j, k in nodes)
    Q = Quiver((zero,) + tuple(nodes), tuple(arrows), {"name": f"Q_{{{chi},{N}}}"})
    lattice = Lattice(1 + len(nodes), (1,) + tuple(k for _, k in nodes))
    matrix = ((1,) + (0,) * len(nodes), (0,) + tuple(k for _, k in nodes))
    # with chi = 0 the image misses the n direction, so there is no lattice map
    pi = LatticeMap(matrix, lattice, d0d6_lattice()) if chi else None
    return StandardQuiver(chi, N, Q, lattice, antisym_pairing(Q), matrix, pi)


def reflection_map(r: int, n_vec: Sequence[int], ks: Sequence[int]) -> Tuple[int, Tuple[int, ...]]:
    """(r, n) -> (n - r, n) where n = sum_k k * n_{j,k}; ks lists k per node."""
    n = sum(k * c for k, c in zip(ks, n_vec))
    return n - r, tuple(n_vec)


def reflection_matrix(ks: Sequence[int]) -> Tuple[Tuple[int, ...], ...]:
    """Matrix of the reflection on Z^{1+|I|}; ks = () gives the rank-2 (r, n) version."""
    if not ks:
        return ((-1, 1), (0, 1))
    d = 1 + len(ks)
    rows = [(-1,) + tuple(ks)]
    for i in range(1, d):
        rows.append(tuple(1 if j == i else 0 for j in range(d)))
    return tuple(rows)


@dataclass(frozen=True)
class Restriction:
    quiver: Quiver
    positions: Tuple[int, ...]
    ambient_rank: int

    def embed(self, lam: Sequence[int]) -> ClassVector:
        if len(lam) != len(self.positions):
            raise LatticeError("dimension vector does not match the restricted quiver")
        out = [0] * self.ambient_rank
        for p, c in zip(self.positions, lam):
            out[p] = c
        return tuple(out)


def restrict(Q: Quiver, keep) -> Restriction:
    keep = set(keep)
    unknown = keep - set(Q.vertices)
    if unknown:
        raise QuiverError(f"unknown vertices {sorted(map(repr, unknown))}")
    verts = tuple(v for v in Q.vertices if v in keep)
    arrows = tuple(a for a in Q.arrows if a[0] in keep and a[1] in keep)
    positions = tuple(i for i, v in enumerate(Q.vertices) if v in keep)
    return Restriction(Quiver(verts, arrows, dict(Q.metadata)), positions, len(Q.vertices))


def gamma_support(S: Spectrum, gamma: Sequence[int], cap: int = 200_000) -> List[ClassVector]:
    """Support classes mu <= gamma such that gamma - mu is a sum of support classes."""
    gamma = as_class(gamma)
    S.lattice.check(gamma)
    if not is_positive(gamma):
        raise LatticeError("gamma must be a positive class")
    size = 1
    for c in gamma:
        size *= c + 1
        if size > cap:
            raise EnumerationLimit(f"more than {cap} lattice points below {gamma}")
    support = [mu for mu in S if all(a <= b for a, b in zip(mu, gamma))]
    points = sorted(product(*(range(c + 1) for c in gamma)), key=sum)
    reachable = set()
    for x in points:
        if not any(x):
            reachable.add(x)
            continue
        for mu in support:
            if all(a <= b for a, b in zip(mu, x)) and sub(x, mu) in reachable:
                reachable.add(x)
                break
    return [mu for mu in support if sub(gamma, mu) in reachable]


@dataclass(frozen=True)
class BpsQuiverResult:
    quiver: Quiver
    class_of_vertex: Dict[Vertex, ClassVector]
    gamma_support: Tuple[ClassVector, ...]


def build_bps_quiver(S: Spectrum, P: PairingForm, gamma: Sequence[int],
                     cap: int = 200_000) -> BpsQuiverResult:
    """Vertices (mu, j), j <= |Omega(mu)|; <mu, mu'> > 0 arrows (mu,j)->(mu',j'); loop iff Omega(mu) < 0."""
    support = gamma_support(S, gamma, cap)
    mult = {}
    for mu in support:
        value = S[mu]
        if value.denominator != 1:
            raise QuiverError(f"Omega{mu} = {value} is not an integer")
        mult[mu] = int(value)
    vertices = [(mu, j) for mu in support for j in range(1, abs(mult[mu]) + 1)]
    arrows: List[Arrow] = []
    for mu, mu2 in product(support, repeat=2):
        p = pair(P, mu, mu2)
        if p <= 0:
            continue
        for j in range(1, abs(mult[mu]) + 1):
            for j2 in range(1, abs(mult[mu2]) + 1):
                arrows.extend([((mu, j), (mu2, j2))] * p)
    for mu in support:
        if mult[mu] < 0:
            arrows.extend(((mu, j), (mu, j)) for j in range(1, -mult[mu] + 1))
    Q = Quiver(tuple(vertices), tuple(arrows), {"name": f"BPS quiver of type {tuple(gamma)}"})
    return BpsQuiverResult(Q, {v: v[0] for v in vertices}, tuple(support))


def canonical_form(Q: Quiver, class_of_vertex: Mapping[Vertex, Sequence[int]]):
    """Relabel vertices by (class, j) and return the sorted arrow multiset.

    Vertices of the same class are numbered j = 1, 2, ... in quiver order.
    """
    seen: Counter = Counter()
    label = {}
    for v in Q.vertices:
        c = as_class(class_of_vertex[v])
        seen[c] += 1
        label[v] = (c, seen[c])
    return (tuple(sorted(label.values())),
            tuple(sorted((label[s], label[t]) for s, t in Q.arrows)))


def standard_class_map(sq: StandardQuiver) -> Dict[Vertex, ClassVector]:
    """Vertex -> pi(e_v) for Q_{chi,N}."""
    cols = list(zip(*sq.pi_matrix))
    return {v: tuple(cols[i]) for i, v in enumerate(sq.quiver.vertices)}


def _dot_label(v: Vertex) -> str:
    if isinstance(v, tuple) and len(v) == 2 and isinstance(v[0], tuple):
        return ",".join(map(str, v[0])) + ";" + str(v[1])
    if isinstance(v, tuple):
        return ",".join(map(str, v))
    return str(v)


def export_dot(Q: Quiver, name: str = "Q") -> str:
    """Deterministic DOT digraph; vertices and arrows in canonical order."""
    lines = [f"digraph {name} {{"]
    ids = {v: f"v{i}" for i, v in enumerate(Q.vertices)}
    for v in Q.vertices:
        lines.append(f'  {ids[v]} [label="{_dot_label(v)}"];')
    for (s, t), count in sorted(Q.arrow_counts().items(),
                                key=lambda item: (Q.index(item[0][0]), Q.index(item[0][1]))):
        for _ in range(count):
            lines.append(f"  {ids[s]} -> {ids[t]};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_json(Q: Quiver) -> dict:
    return {
        "vertices": [_dot_label(v) for v in Q.vertices],
        "arrows": [[_dot_label(s), _dot_label(t)] for s, t in Q.arrows],
        "loops": len(Q.loops),
        "pairing": [list(r) for r in antisym_pairing(Q).matrix],
    }


def framed_quiver(inner: Quiver, attach: Vertex, name: str = "") -> Quiver:
    """Adjoin a vertex 'inf' with one arrow inf -> attach, placed first."""
    inf = "inf"
    if inf in inner.vertices:
        raise QuiverError("quiver already has a vertex 'inf'")
    return Quiver((inf,) + inner.vertices, ((inf, attach),) + inner.arrows,
                  {"name": name or f"framed {inner.metadata.get('name', '')}".strip()})


__all__ = [
    "Quiver", "StandardQuiver", "BpsQuiverResult", "Restriction", "QuiverError",
    "EnumerationLimit", "build_standard", "euler_form", "antisym_pairing", "opposite",
    "reflection_map", "reflection_matrix", "restrict", "gamma_support", "build_bps_quiver",
    "canonical_form", "standard_class_map", "export_dot", "to_json", "framed_quiver",
    "d0d6_lattice", "d0d6_pairing",
]
