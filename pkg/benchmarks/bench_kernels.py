"""Compare the compiled and pure-Python kernels.

Times the series product and the Hamiltonian derivation on dense random
series, then one end-to-end wall crossing per backend in a subprocess (the
backend is fixed at import, so the pure run needs its own interpreter).

    python benchmarks/bench_kernels.py [--level 6] [--repeat 5]
"""
import argparse
import json
import os
import random
import subprocess
import sys
import timeit
from fractions import Fraction

from dtquiver import _kernels
from dtquiver.lattice import Lattice, PairingForm
from dtquiver.series import MonomialBasis

try:
    from dtquiver import _ckernels
except ImportError:
    _ckernels = None

E2E = """
import time, dtquiver
from dtquiver import models, wall_cross
t = time.perf_counter()
for chi in (-1, 1, 2):
    m = models.d0d6(chi, {L})
    wall_cross(m.spectrum, m.z_minus, m.z_plus, m.pairing, {L})
m = models.conifold_center({L})
wall_cross(m.spectrum, m.z_minus, m.z_plus, m.pairing, {L})
print(dtquiver.BACKEND, time.perf_counter() - t)
"""


def random_series(basis, rng, density):
    keys = [k for k in range(1, len(basis)) if rng.random() < density]
    return {k: rng.randint(-9, 9) or 1 for k in keys}


def kernel_times(level, repeat, density=0.5):
    P = PairingForm(((0, 1, 2), (-1, 0, -1), (-2, 1, 0)))
    basis = MonomialBasis(Lattice(3), P, level)
    T = basis.tables
    Tp = _kernels.make_tables(T.ell, T.keys, T.amask, T.pmask, T.exps, T.rowp,
                              T.key_to_idx, T.level, T.twisted)
    rng = random.Random(0)
    a, b = random_series(basis, rng, density), random_series(basis, rng, density)
    rows = []
    backends = [("python", _kernels, Tp)]
    if _ckernels is not None:
        backends.append(("cython", _ckernels, _ckernels.make_tables(*Tp)))
    for name, mod, tables in backends:
        for op in ("mul", "derive"):
            fn = getattr(mod, op)
            t = min(timeit.repeat(lambda: fn(a, b, tables), number=20, repeat=repeat)) / 20
            rows.append((op, name, t))
    return len(basis), rows


def end_to_end(level):
    out = {}
    for pure in (False, True):
        env = dict(os.environ)
        env.pop("DTQUIVER_PURE_PYTHON", None)
        if pure:
            env["DTQUIVER_PURE_PYTHON"] = "1"
        proc = subprocess.run([sys.executable, "-c", E2E.format(L=level)], env=env,
                              capture_output=True, text=True, check=True)
        name, secs = proc.stdout.split()
        out[name] = float(secs)
    return out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--level", type=int, default=6)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args(argv)

    size, rows = kernel_times(args.level, args.repeat)
    e2e = end_to_end(args.level)
    if args.json:
        print(json.dumps({"monomials": size, "kernels": rows, "end_to_end": e2e}, indent=2))
        return
    print(f"rank 3 algebra at level {args.level}: {size} monomials")
    times = {(op, name): t for op, name, t in rows}
    for op in ("mul", "derive"):
        line = f"  {op:7s} python {times[op, 'python'] * 1e3:8.3f} ms"
        if (op, "cython") in times:
            c = times[op, "cython"]
            line += f"   cython {c * 1e3:8.3f} ms   x{times[op, 'python'] / c:.1f}"
        print(line)
    print("end to end (D0-D6 chi=-1,1,2 and conifold):")
    for name, secs in sorted(e2e.items()):
        print(f"  {name:7s} {secs:.3f} s")
    if len(e2e) == 2:
        print(f"  speedup x{e2e['python'] / e2e['cython']:.1f}")


if __name__ == "__main__":
    main()
