"""Command line front end: ``dtquiver quiver | bps-quiver | wallcross | oracle | check``.

Exit codes: 0 success, 2 invalid input, 3 internal consistency failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

try:
    import tomllib
except ModuleNotFoundError:
    import tomli as tomllib

from . import engine, models, oracle
from .lattice import OMEGA, Lattice, LatticeMap, PairingForm, Spectrum, pushforward
from .quiver import antisym_pairing, build_bps_quiver, build_standard, export_dot, to_json
from .stability import CentralCharge, validate_generic

EXIT_OK, EXIT_INVALID, EXIT_INTERNAL = 0, 2, 3


class ConfigError(ValueError):
    pass


def rational(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def spectrum_json(S: Spectrum) -> list:
    return [{"class": list(g), "value": rational(v)} for g, v in S.items()]


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _ints(text: str) -> list:
    try:
        return [int(t) for t in str(text).replace(" ", "").split(",") if t != ""]
    except ValueError:
        raise ConfigError(f"expected comma separated integers, got {text!r}") from None


# -- config ---------------------------------------------------------------------

def _charge(section, key) -> CentralCharge:
    values = section.get("values") if isinstance(section, dict) else section
    if not values:
        raise ConfigError(f"[charge.{key}] needs a list of 're,im' values")
    return CentralCharge.from_strings([str(v) for v in values])


def load_config(path) -> dict:
    with open(path, "rb") as fh:
        try:
            return tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from None


def build_problem(cfg: dict) -> dict:
    """Resolve a parsed config into lattice, pairing, charges, spectrum and options."""
    run = cfg.get("run", {})
    if "truncation" not in run:
        raise ConfigError("[run] truncation is required")
    L = int(run["truncation"])
    if L < 1:
        raise ConfigError("truncation must be at least 1")
    spec = cfg.get("spectrum", {})
    model = None
    if "generator" in spec:
        model = models.generate(str(spec["generator"]), L, **dict(spec.get("params", {})))
    if "lattice" in cfg:
        lat = cfg["lattice"]
        lattice = Lattice(int(lat["rank"]), tuple(lat.get("weights", ())))
    elif model is not None:
        lattice = model.lattice
    else:
        raise ConfigError("[lattice] is required without a spectrum generator")
    if "pairing" in cfg:
        pairing = PairingForm(tuple(tuple(r) for r in cfg["pairing"]["rows"]))
    elif model is not None:
        pairing = model.pairing
    else:
        raise ConfigError("[pairing] is required without a spectrum generator")
    charges = cfg.get("charge", {})
    z_minus = _charge(charges["minus"], "minus") if "minus" in charges else (model and model.z_minus)
    z_plus = _charge(charges["plus"], "plus") if "plus" in charges else (model and model.z_plus)
    if z_minus is None or z_plus is None:
        raise ConfigError("both [charge.minus] and [charge.plus] are required")
    if model is not None and "entries" not in spec:
        S = model.spectrum
        if S.lattice != lattice:
            raise ConfigError("generated spectrum does not live on the configured lattice")
        S = S.restrict(L) if S.truncation >= L else Spectrum(OMEGA, lattice, L, dict(S.items()))
    else:
        entries = {}
        for item in spec.get("entries", []):
            g = tuple(int(c) for c in item["class"])
            entries[g] = entries.get(g, 0) + Fraction(str(item["value"]))
        S = Spectrum(OMEGA, lattice, L, entries)
    for name, z in (("minus", z_minus), ("plus", z_plus)):
        if z.rank != lattice.rank:
            raise ConfigError(f"charge.{name} has {z.rank} values for a rank-{lattice.rank} lattice")
    involution = run.get("involution")
    if involution is None and model is not None and spec.get("use_model_involution", True):
        involution = model.involution
    push = None
    if "pushforward" in run or "pushforward" in cfg:
        push = _pushforward_problem(cfg, run, lattice, model)
    elif model is not None and model.projection is not None:
        push = _pushforward_problem(cfg, {"pushforward": model.projection.matrix}, lattice, model)
    return {"lattice": lattice, "pairing": pairing, "z_minus": z_minus, "z_plus": z_plus,
            "spectrum": S, "L": L, "involution": involution, "pushforward": push}


def _pushforward_problem(cfg, run, lattice, model) -> dict:
    section = cfg.get("pushforward", {})
    matrix = section.get("matrix", run.get("pushforward"))
    if matrix is None:
        raise ConfigError("[pushforward] needs a matrix")
    matrix = tuple(tuple(int(x) for x in r) for r in matrix)
    rows = len(matrix)
    target = Lattice(rows, tuple(section.get("weights", ())))
    if "pairing" in section:
        tp = PairingForm(tuple(tuple(r) for r in section["pairing"]))
    elif model is not None and model.projection is not None:
        tp = models.d0d6_pairing()
    else:
        raise ConfigError("[pushforward] needs the target pairing")
    if "minus" in section and "plus" in section:
        zm, zp = CentralCharge.from_strings(section["minus"]), CentralCharge.from_strings(section["plus"])
    elif model is not None and model.projection is not None:
        zm, zp = models.d0d6_charges()
    else:
        raise ConfigError("[pushforward] needs target charges minus and plus")
    return {"map": LatticeMap(matrix, lattice, target), "pairing": tp, "z_minus": zm, "z_plus": zp}


def run_wallcross(cfg: dict) -> dict:
    prob = build_problem(cfg)
    S, P, L = prob["spectrum"], prob["pairing"], prob["L"]
    res = engine.wall_cross_full(S, prob["z_minus"], prob["z_plus"], P, L)
    # the operator built from the new spectrum must match the one we factorized
    before = engine.ordered_product(prob["z_minus"], res.dtbar_minus, P, L)
    after = engine.ordered_product(prob["z_plus"], res.dtbar_plus, P, L)
    if not before.agrees(after, L):
        raise engine.EngineError("roundtrip failure: ordered products differ")
    bad = validate_generic(prob["z_plus"], P, list(res.omega_plus))
    checks = {
        "generic_plus": {"ok": not bad, "violations": [[list(a), list(b)] for a, b in bad]},
        "integrality": _integrality(res.omega_plus),
    }
    if prob["involution"] is not None:
        rep = oracle.check_symmetry(res.omega_plus, prob["involution"])
        checks["symmetry"] = {
            "ok": rep.ok,
            "tested": len(rep.tested),
            "untested": [list(g) for g in rep.untested],
            "violations": [{"class": list(g), "partner": list(h), "value": rational(v),
                            "partner_value": rational(w)} for g, h, v, w in rep.violations],
        }
    if prob["pushforward"] is not None:
        pf = prob["pushforward"]
        pi = pf["map"]
        lhs = pushforward(res.omega_plus, pi)
        rhs = engine.wall_cross(pushforward(S, pi), pf["z_minus"], pf["z_plus"], pf["pairing"], L)
        diff = sorted(set(lhs) | set(rhs), key=lambda g: (sum(g), g))
        diff = [g for g in diff if lhs.get(g) != rhs.get(g)]
        checks["pushforward"] = {"ok": not diff, "mismatches": [list(g) for g in diff],
                                 "omega_plus_target": spectrum_json(lhs)}
    return {
        "lattice": {"rank": prob["lattice"].rank, "weights": list(prob["lattice"].weights)},
        "truncation": L,
        "omega_minus": spectrum_json(res.omega_minus),
        "dtbar_minus": spectrum_json(res.dtbar_minus),
        "omega_plus": spectrum_json(res.omega_plus),
        "dtbar_plus": spectrum_json(res.dtbar_plus),
        "checks": checks,
    }


def _integrality(S: Spectrum) -> dict:
    bad = oracle.check_integrality(S)
    return {"ok": not bad, "violations": [{"class": list(g), "value": rational(v)} for g, v in bad]}


def _run_one(path: str) -> dict:
    return run_wallcross(load_config(path))


def _run_many(paths, jobs: int) -> list:
    if jobs > 1 and len(paths) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_run_one, paths))
    return [_run_one(p) for p in paths]


# -- subcommands ------------------------------------------------------------------

def _model_from_args(args, bound: int):
    params = {}
    if args.chi is not None:
        params["chi"] = args.chi
    if args.N is not None:
        params["N"] = args.N
    if args.sigma:
        params["sigma"] = args.sigma
    if args.type:
        params["type"] = args.type
    return models.generate(args.model, bound, **params)


def cmd_quiver(args) -> str:
    if args.model:
        model = _model_from_args(args, 1)
        Q, pairing, projection = model.quiver, model.pairing, model.projection
        if Q is None:
            raise ConfigError(f"model {args.model!r} has no quiver")
        name = args.model
    else:
        if args.chi is None or args.N is None:
            raise ConfigError("quiver needs --chi and --N, or --model")
        if args.N < 0:
            raise ConfigError("N must be non-negative")
        sq = build_standard(args.chi, args.N)
        Q, pairing, projection = sq.quiver, sq.pairing, sq.projection
        name = "Q"
    return _emit(Q, pairing, projection, args.emit, name)


def _emit(Q, pairing, projection, emit, name) -> str:
    if emit == "dot":
        head = [f"// pairing {json.dumps([list(r) for r in pairing.matrix])}"]
        if projection is not None:
            head.append(f"// projection {json.dumps([list(r) for r in projection.matrix])}")
        return "\n".join(head) + "\n" + export_dot(Q, name)
    out = to_json(Q)
    out["pairing"] = [list(r) for r in pairing.matrix]
    out["projection"] = None if projection is None else [list(r) for r in projection.matrix]
    return dumps(out)


def cmd_bps_quiver(args) -> str:
    gamma = tuple(_ints(args.gamma))
    if not args.model:
        raise ConfigError("bps-quiver needs --model")
    probe = _model_from_args(args, 1)
    bound = probe.lattice.ell(gamma) if len(gamma) == probe.lattice.rank else 0
    if bound <= 0:
        raise ConfigError(f"gamma must be a nonzero positive class of rank {probe.lattice.rank}")
    model = _model_from_args(args, bound)
    res = build_bps_quiver(model.spectrum, model.pairing, gamma)
    return _emit(res.quiver, antisym_pairing(res.quiver), None, args.emit, "Q_gamma")


def cmd_wallcross(args) -> str:
    results = _run_many(args.configs, args.jobs)
    if len(results) == 1:
        return dumps(results[0])
    return dumps([dict(r, config=str(p)) for p, r in zip(args.configs, results)])


def _csv(rows) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def cmd_oracle(args) -> str:
    if args.which == "macmahon":
        coeffs = oracle.macmahon(args.chi if args.chi is not None else 1, args.nmax)
        return _csv([("n", "coefficient")] + [(n, c) for n, c in enumerate(coeffs)])
    if args.which == "framed":
        if args.chi is None or args.N is None or args.n is None:
            raise ConfigError("framed needs --chi, --N and --n")
        value = oracle.framed_rank1(args.chi, args.N, _ints(args.n))
        return _csv([("n", "value"), (args.n, value)])
    rep = oracle.one_loop_identity(args.nmax)
    rows = [("n", "lhs", "rhs")] + [(n, rational(a), rational(b))
                                    for n, (a, b) in enumerate(zip(rep.lhs, rep.rhs))]
    text = _csv(rows)
    if not rep.passed:
        raise engine.EngineError(text + f"FAIL at order {rep.first_failure}")
    return text + "PASS\n"


def cmd_check(args) -> str:
    lines, failed = [], False
    for path, res in zip(args.configs, _run_many(args.configs, args.jobs)):
        for name, rep in sorted(res["checks"].items()):
            lines.append(f"{path}\t{name}\t{'PASS' if rep['ok'] else 'FAIL'}")
            failed |= not rep["ok"]
    text = "\n".join(lines) + "\n"
    if failed:
        raise engine.EngineError(text.rstrip())
    return text


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dtquiver", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def model_opts(sp):
        sp.add_argument("--model", choices=models.GENERATORS)
        sp.add_argument("--chi", type=int)
        sp.add_argument("--N", type=int)
        sp.add_argument("--sigma", help="sign word such as +-+")
        sp.add_argument("--type", help="McKay type such as A2, D4, E6")
        sp.add_argument("--emit", choices=("dot", "json"), default="json")

    q = sub.add_parser("quiver", help="print Q_{chi,N} or a model quiver")
    model_opts(q)
    q.set_defaults(func=cmd_quiver)

    b = sub.add_parser("bps-quiver", help="BPS quiver of a model spectrum at a class gamma")
    model_opts(b)
    b.add_argument("--gamma", required=True)
    b.set_defaults(func=cmd_bps_quiver)

    for name, func, text in (("wallcross", cmd_wallcross, "run wall-crossing configs, print JSON"),
                             ("check", cmd_check, "run configs and report each check")):
        w = sub.add_parser(name, help=text)
        w.add_argument("configs", nargs="+")
        w.add_argument("--jobs", type=int, default=1)
        w.set_defaults(func=func)

    o = sub.add_parser("oracle", help="closed-form oracles as CSV")
    o.add_argument("which", choices=("macmahon", "framed", "oneloop"))
    o.add_argument("--chi", type=int)
    o.add_argument("--N", type=int)
    o.add_argument("--n", help="dimension vector over the (j,k) vertices")
    o.add_argument("--nmax", type=int, default=6)
    o.set_defaults(func=cmd_oracle)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    try:
        sys.stdout.write(args.func(args))
    except engine.EngineError as exc:
        print(f"dtquiver: internal consistency failure: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (ValueError, KeyError, TypeError, OSError) as exc:
        print(f"dtquiver: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
