"""Acceptance criteria, one test per criterion.

Each criterion prints a single PASS/FAIL line.  Under pytest the lines are
collected in RESULTS and shown in the terminal summary (see conftest.py);
``python tests/test_acceptance.py`` runs them directly.  All comparisons are
exact and every criterion carries a wall-clock budget in seconds.
"""
import functools
import random
import sys
import time
from fractions import Fraction

from dtquiver import models, oracle
from dtquiver.engine import factorize, ordered_product, wall_cross, wall_cross_full
from dtquiver.lattice import (OMEGA, Lattice, LatticeMap, PairingForm, Spectrum, dtbar_to_omega,
                              omega_to_dtbar, pushforward)
from dtquiver.quiver import (build_bps_quiver, build_standard, canonical_form, d0d6_pairing,
                             standard_class_map)
from dtquiver.stability import GREATER, CentralCharge, phase_compare, validate_generic

RESULTS = {}

# counted by hand from alpha + n delta with alpha a finite root: affine A1 has
# (n+1, n) and (n, n+1) for n = 0..4; affine A2 (height of delta 3) gives
# 9 roots with alpha > 0 and 9 with alpha < 0, n >= 1
REAL_ROOT_COUNTS = {"A2": 18, "A1": 10}


def criterion(number, title, budget):
    def deco(fn):
        @functools.wraps(fn)
        def run():
            t0 = time.perf_counter()
            detail, ok = "", False
            try:
                detail = fn() or ""
                ok = True
            except AssertionError as exc:
                detail = str(exc).splitlines()[0] if str(exc) else "assertion failed"
                raise
            finally:
                elapsed = time.perf_counter() - t0
                if ok and elapsed > budget:
                    ok, detail = False, f"over budget: {elapsed:.2f}s > {budget}s"
                status = "PASS" if ok else "FAIL"
                line = f"[{status}] {number:2d}. {title} ({elapsed:.2f}s / {budget}s)"
                if detail:
                    line += f" - {detail}"
                RESULTS[number] = line
            assert elapsed <= budget, f"criterion {number} took {elapsed:.2f}s, budget {budget}s"
        run.criterion = number
        return run
    return deco


# shared computations, reused by the integrality and symmetry criteria

@functools.lru_cache(maxsize=None)
def d0d6_run(chi, L=5):
    m = models.d0d6(chi, L)
    return m, wall_cross(m.spectrum, m.z_minus, m.z_plus, m.pairing, L)


@functools.lru_cache(maxsize=None)
def standard_run(chi=1, N=3, L=3):
    m = models.standard_model(chi, N, L)
    return m, wall_cross(m.spectrum, m.z_minus, m.z_plus, m.pairing, L)


@functools.lru_cache(maxsize=None)
def conifold_run(L=6):
    m = models.conifold_center(L)
    return m, wall_cross_full(m.spectrum, m.z_minus, m.z_plus, m.pairing, L)


@criterion(1, "standard quiver shapes", 1)
def test_criterion_01_quiver_structure():
    q = build_standard(2, 3).quiver
    assert (len(q.vertices), len(q.proper_arrows), len(q.loops)) == (7, 12, 6)
    q = build_standard(-2, 3).quiver
    assert (len(q.vertices), len(q.arrows), len(q.loops)) == (7, 12, 0)


@criterion(2, "pairing and central charges pull back along pi", 1)
def test_criterion_02_compatibility():
    X = d0d6_pairing()
    checked = 0
    for chi in (-2, -1, 1, 2):
        for N in range(1, 5):
            m = models.standard_model(chi, N, N)
            mx = models.d0d6(chi, N)
            pi = m.projection
            basis = [m.lattice.basis(i) for i in range(m.lattice.rank)]
            for a in basis:
                for b in basis:
                    assert m.pairing(a, b) == X(pi(a), pi(b)), (chi, N, a, b)
                assert m.z_minus(a) == mx.z_minus(pi(a)), (chi, N, a)
                assert m.z_plus(a) == mx.z_plus(pi(a)), (chi, N, a)
            checked += 1
    return f"{checked} quivers"


@criterion(3, "D0-D6 wall crossing reproduces MacMahon at L=5", 30)
def test_criterion_03_macmahon():
    for chi in (-1, 1, 2):
        _, out = d0d6_run(chi)
        got = [out.get((1, n)) for n in range(5)]
        assert got == oracle.macmahon(chi, 4), (chi, got)


@criterion(4, "pushforward commutes with wall crossing on Q_{1,3}", 60)
def test_criterion_04_pushforward():
    m, out = standard_run()
    mx = models.d0d6(1, 3)
    rhs = wall_cross(pushforward(m.spectrum, m.projection), mx.z_minus, mx.z_plus, mx.pairing, 3)
    lhs = pushforward(out, m.projection)
    assert lhs == rhs, (lhs, rhs)
    framed = [b for b in m.lattice.positive_classes(3) if b[0] == 1]
    for beta in framed:
        assert out.get(beta) == oracle.framed_rank1(1, 3, beta[1:]), beta
    return f"{len(framed)} framed classes"


@criterion(5, "integrality of every computed Omega", 60)
def test_criterion_05_integrality():
    spectra = [d0d6_run(chi)[1] for chi in (-1, 1, 2)]
    spectra.append(standard_run()[1])
    spectra.append(conifold_run()[1].omega_plus)
    bad = [v for S in spectra for v in oracle.check_integrality(S)]
    assert not bad, bad[:5]
    return f"{sum(len(S) for S in spectra)} values"


@criterion(6, "involution symmetry for D0-D6 and the conifold", 60)
def test_criterion_06_symmetry():
    tested = 0
    for chi in (-1, 1, 2):
        m, out = d0d6_run(chi)
        rep = oracle.check_symmetry(out, m.involution)
        assert rep.ok, (chi, rep.violations[:3])
        tested += len(rep.tested)
    m, res = conifold_run()
    rep = oracle.check_symmetry(res.omega_plus, m.involution)
    assert rep.ok, rep.violations[:3]
    assert rep.tested
    return f"{tested + len(rep.tested)} classes tested"


@criterion(7, "conifold wall crossing at L=6", 60)
def test_criterion_07_conifold():
    m, res = conifold_run()
    # genericity is required on the supports each charge is used for
    assert validate_generic(m.z_minus, m.pairing, list(m.spectrum)) == []
    assert validate_generic(m.z_plus, m.pairing, list(res.omega_plus)) == []
    assert oracle.check_integrality(res.omega_plus) == []
    assert oracle.check_symmetry(res.omega_plus, m.involution).ok
    # e_inf has the largest phase on the plus side
    e_inf = m.lattice.basis(0)
    assert all(phase_compare(m.z_plus, e_inf, m.lattice.basis(i)) == GREATER for i in (1, 2))
    return f"{len(res.omega_plus)} nonzero invariants"


def _random_case(rng):
    # rank 1 has zero pairing, so every class is invisible to factorize
    rank = rng.randint(2, 3)
    L = rng.randint(1, 6)
    lat = Lattice(rank)
    while True:
        m = [[0] * rank for _ in range(rank)]
        for i in range(rank):
            for j in range(i + 1, rank):
                v = rng.randint(-3, 3)
                m[i][j], m[j][i] = v, -v
        P = PairingForm(tuple(map(tuple, m)))
        classes = [g for g in lat.positive_classes(L) if not P.is_invisible(g)]
        if not classes:
            continue
        support = rng.sample(classes, min(len(classes), rng.randint(1, 5)))
        S = Spectrum(OMEGA, lat, L, {g: rng.choice([-3, -2, -1, 1, 2, 3]) for g in support})
        Z = CentralCharge(tuple((Fraction(rng.randint(-12, 12), rng.randint(1, 4)),
                                 Fraction(rng.randint(1, 12), rng.randint(1, 4)))
                                for _ in range(rank)))
        if not validate_generic(Z, P, list(S)):
            return S, Z, P, L


@criterion(8, "pentagon and factorize/ordered_product roundtrips", 60)
def test_criterion_08_roundtrips():
    X = Lattice(2)
    P = PairingForm(((0, 1), (-1, 0)))
    S = Spectrum(OMEGA, X, 6, {(1, 0): 1, (0, 1): 1})
    out = wall_cross(S, CentralCharge(("1,1", "-1,1")), CentralCharge(("-1,1", "1,1")), P, 6)
    assert dict(out.items()) == {(1, 0): 1, (1, 1): 1, (0, 1): 1}, out
    rng = random.Random(20240501)
    for k in range(20):
        S, Z, P, L = _random_case(rng)
        D = omega_to_dtbar(S)
        back = factorize(ordered_product(Z, D, P, L), Z, P, L)
        assert back == D, (k, S)
        assert dtbar_to_omega(back) == S, k
    return "20 random spectra"


def _random_surjection(rng):
    t = rng.randint(1, 2)
    cols = [tuple(int(i == j) for i in range(t)) for j in range(t)]
    for _ in range(rng.randint(0, 2)):
        col = tuple(rng.randint(0, 2) for _ in range(t))
        cols.append(col if any(col) else (1,) + col[1:])
    source = Lattice(len(cols), tuple(max(1, sum(c)) for c in cols))
    return LatticeMap(tuple(tuple(c[i] for c in cols) for i in range(t)), source, Lattice(t))


@criterion(9, "multi-cover inversion and pushforward on random spectra", 10)
def test_criterion_09_multicover():
    rng = random.Random(7)
    for k in range(50):
        pi = _random_surjection(rng)
        L = rng.randint(1, 6)
        classes = list(pi.source.positive_classes(L))
        support = rng.sample(classes, min(len(classes), rng.randint(0, 8)))
        S = Spectrum(OMEGA, pi.source, L,
                     {g: Fraction(rng.randint(-6, 6), rng.randint(1, 4)) for g in support})
        assert dtbar_to_omega(omega_to_dtbar(S)) == S, k
        assert pushforward(omega_to_dtbar(S), pi) == omega_to_dtbar(pushforward(S, pi)), k
    return "50 random spectra"


@criterion(10, "one-loop identity to order q^12", 1)
def test_criterion_10_one_loop():
    assert oracle.one_loop_identity(12).passed
    # same identity fed with invariants computed by the engine on the framed one-loop quiver
    m = models.standard_model(1, 1, 13)
    out = wall_cross(m.spectrum, m.z_minus, m.z_plus, m.pairing, 13)
    dt = omega_to_dtbar(m.spectrum)
    rep = oracle.one_loop_identity(12, dtbar=lambda n: dt.get((0, n)),
                                   ndt=lambda n: out.get((1, n)))
    assert rep.passed, rep.first_failure


@criterion(11, "affine real roots match the exhaustive scan", 5)
def test_criterion_11_real_roots():
    counts = {}
    for name, (kind, n) in {"A2": ("A", 2), "A1": ("A", 1)}.items():
        C = models.affine_cartan(kind, n)
        roots = models.real_roots(C, 9)
        assert roots == oracle.scan_real_roots(C.matrix, 9), name
        counts[name] = len(roots)
    assert counts == REAL_ROOT_COUNTS, counts
    return ", ".join(f"{k}: {v} roots" for k, v in counts.items())


@criterion(12, "BPS quiver regenerates the standard quiver", 5)
def test_criterion_12_bps_quiver():
    for chi in (1, 2, -2):
        for N in (1, 2, 3):
            res = build_bps_quiver(models.d0d6_minus(chi, N + 1), d0d6_pairing(), (1, N))
            sq = build_standard(chi, N)
            assert canonical_form(res.quiver, res.class_of_vertex) == canonical_form(
                sq.quiver, standard_class_map(sq)), (chi, N)


def main():
    tests = sorted((f for f in globals().values() if hasattr(f, "criterion")),
                   key=lambda f: f.criterion)
    failed = 0
    for t in tests:
        try:
            t()
        except AssertionError:
            failed += 1
        print(RESULTS[t.criterion])
    print(f"{len(tests) - failed}/{len(tests)} criteria passed")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
