from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from dtquiver import _kernels
from dtquiver.lattice import Lattice, LatticeError, PairingForm
from dtquiver.series import MonomialBasis, TruncatedSeries, TruncationTooLarge

try:
    from dtquiver import _ckernels
except ImportError:
    _ckernels = None

P3 = PairingForm(((0, 1, 2), (-1, 0, -1), (-2, 1, 0)))
B3 = MonomialBasis(Lattice(3), P3, 5)
B3u = MonomialBasis(Lattice(3), P3, 5, twisted=False)


def series(basis, draw):
    mons = basis.monomials
    chosen = draw(st.lists(st.sampled_from(mons), max_size=6, unique=True))
    vals = st.fractions(-3, 3, max_denominator=3)
    return TruncatedSeries(basis, {g: draw(vals) for g in chosen})


def test_basis_layout():
    b = MonomialBasis(Lattice(2, (1, 2)), PairingForm(((0, 1), (-1, 0))), 4)
    assert b.monomials[0] == (0, 0)
    assert b.monomials[1:4] == ((1, 0), (0, 1), (2, 0))
    assert len(b) == 1 + 8
    with pytest.raises(TruncationTooLarge):
        MonomialBasis(Lattice(8), PairingForm(tuple((0,) * 8 for _ in range(8))), 40)


def test_twisted_product_signs():
    b = MonomialBasis(Lattice(2), PairingForm(((0, 1), (-1, 0))), 3)
    x1 = TruncatedSeries.monomial(b, (1, 0))
    x2 = TruncatedSeries.monomial(b, (0, 1))
    assert (x1 * x2).terms() == {(1, 1): -1}
    assert (x2 * x1).terms() == {(1, 1): -1}
    assert (x1 * x1 * x1 * x1).terms() == {}  # beyond level 3


def test_truncation_and_validation():
    x = TruncatedSeries(B3, {(3, 3, 0): 1, (1, 0, 0): Fraction(1, 2)})
    assert x.terms() == {(1, 0, 0): Fraction(1, 2)}
    with pytest.raises(LatticeError):
        TruncatedSeries(B3, {(1, -1, 0): 1})
    with pytest.raises(LatticeError):
        TruncatedSeries(B3, {(1, 0): 1})
    y = TruncatedSeries(MonomialBasis(Lattice(3), P3, 4), {(1, 0, 0): 1})
    with pytest.raises(LatticeError):
        x + y


def test_graded_part_and_degrees():
    s = TruncatedSeries(B3, {(1, 0, 0): 2, (1, 1, 0): 3, (0, 2, 0): -1})
    assert s.degrees() == [1, 2]
    assert s.graded_part(2).terms() == {(0, 2, 0): -1, (1, 1, 0): 3}


@given(st.data())
def test_product_associative_and_unital(data):
    for b in (B3, B3u):
        a, c, d = series(b, data.draw), series(b, data.draw), series(b, data.draw)
        one = TruncatedSeries.monomial(b, (0, 0, 0))
        assert (a * c) * d == a * (c * d)
        assert a * one == a == one * a
        assert a * (c + d) == a * c + a * d


@given(st.data())
def test_derivation_is_leibniz(data):
    for b in (B3, B3u):
        h, u, v = series(b, data.draw), series(b, data.draw), series(b, data.draw)
        assert h.derive(u * v) == h.derive(u) * v + u * h.derive(v)


@given(st.data())
def test_flow_is_multiplicative(data):
    h = series(B3, data.draw)
    h = TruncatedSeries._raw(B3, {k: v for k, v in h.num.items() if k != 0}, h.den)
    u, v = series(B3, data.draw), series(B3, data.draw)
    assert h.exp_flow(u * v) == h.exp_flow(u) * h.exp_flow(v)


@pytest.mark.skipif(_ckernels is None, reason="compiled kernels not built")
@given(st.data())
def test_backends_agree(data):
    for b in (B3, B3u):
        T = b.tables
        Tp = _kernels.make_tables(T.ell, T.keys, T.amask, T.pmask, T.exps, T.rowp,
                                  T.key_to_idx, T.level, T.twisted)
        Tc = _ckernels.make_tables(*[getattr(Tp, f) for f in Tp._fields])
        a, c = series(b, data.draw), series(b, data.draw)
        assert _kernels.mul(a.num, c.num, Tp) == _ckernels.mul(a.num, c.num, Tc)
        assert _kernels.derive(a.num, c.num, Tp) == _ckernels.derive(a.num, c.num, Tc)


def test_backends_agree_end_to_end():
    import os
    import subprocess
    import sys
    from pathlib import Path
    cfg = str(Path(__file__).resolve().parent.parent / "configs" / "conifold.toml")
    outs = {}
    for pure in ("", "1"):
        env = {k: v for k, v in os.environ.items() if k != "DTQUIVER_PURE_PYTHON"}
        if pure:
            env["DTQUIVER_PURE_PYTHON"] = pure
        code = "import dtquiver, sys; from dtquiver.cli import main; print(dtquiver.BACKEND); main(sys.argv[1:])"
        proc = subprocess.run([sys.executable, "-c", code, "wallcross", cfg], env=env,
                              capture_output=True, text=True, check=True)
        backend, _, body = proc.stdout.partition("\n")
        outs[backend] = body
    assert "python" in outs
    assert len(set(outs.values())) == 1
