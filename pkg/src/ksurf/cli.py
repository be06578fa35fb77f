"""Command-line driver: solve ends, expand them, and run the self-test.

Commands
    solve-end   solve the end equation for a JSON config, emit CSV + report
    expand      fit the asymptotic series of a solved-end artifact
    steiner     Steiner point of a solved end, or of a symmetric example
    relations   residuals of the three balance relations for an example
    flux        four Killing flux profiles of a solved end as CSV
    oracle-ode  radial shooting oracle, independent of the 2-D solver
    selftest    run the acceptance criteria and report pass/fail

Exit codes: 0 success, 1 selftest failure, 2 numerical failure, 3 usage or
config error.  Reports embed the tool version and the sha256 of the config
that produced them; identical configs give byte-identical reports.
"""

import argparse
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__, functionals, steiner
from .asymptotics import extract_series, radius_centroid
from .endfield import EndFunction
from .endsolver import boundary_samples, newton_solve, ode_radial_solve
from .errors import KsurfError
from .steiner import steiner_geodesic


class ConfigError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; the contract reserves 2 for
    # numerical failures, so usage problems leave through 3
    def error(self, message):
        self.exit(3, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# config and artifact plumbing


_CONFIG_KEYS = {"k", "m", "Y", "Nx", "Ny", "boundary", "newton_tol", "smallness"}


def load_config(path):
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {path}")
    raw = p.read_bytes()
    try:
        cfg = json.loads(raw)
    except json.JSONDecodeError as e:
        raise ConfigError(f"config is not valid JSON: {e}") from e
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(cfg) - _CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    if "k" not in cfg or "boundary" not in cfg:
        raise ConfigError("config requires at least 'k' and 'boundary'")
    k = cfg["k"]
    if not isinstance(k, (int, float)) or not 0.0 < k < 1.0:
        raise ConfigError(f"k must lie strictly between 0 and 1, got {k!r}")
    m = cfg.get("m", 1)
    if not isinstance(m, int) or m < 1:
        raise ConfigError(f"m must be a positive integer, got {m!r}")
    bnd = cfg["boundary"]
    if not isinstance(bnd, dict) or set(bnd) - {"cos", "sin"}:
        raise ConfigError("boundary must be an object with 'cos'/'sin' lists")
    for key in ("cos", "sin"):
        coeffs = bnd.get(key, [])
        if not isinstance(coeffs, list) or not all(
            isinstance(c, (int, float)) for c in coeffs
        ):
            raise ConfigError(f"boundary.{key} must be a list of numbers")
    for key, low in (("Y", 0.0), ("newton_tol", 0.0)):
        if key in cfg and not (isinstance(cfg[key], (int, float)) and cfg[key] > low):
            raise ConfigError(f"{key} must be a positive number")
    for key in ("Nx", "Ny"):
        if key in cfg and not (isinstance(cfg[key], int) and cfg[key] >= 16):
            raise ConfigError(f"{key} must be an integer of at least 16")
    return cfg, hashlib.sha256(raw).hexdigest()


def _write_json(path, payload):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _fnum(x):
    """Floats as shortest round-trip decimal strings, exact under diffing."""
    x = float(x)
    return "inf" if np.isinf(x) else repr(x)


def write_end_artifact(outdir, end, report, config_hash):
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    xg = np.broadcast_to(end.x[:, None], end.u.shape)
    yg = np.broadcast_to(end.y[None, :], end.u.shape)
    table = np.column_stack([xg.ravel(), yg.ravel(), end.u.ravel()])
    np.savetxt(outdir / "end.csv", table, delimiter=",", header="x,y,u",
               comments="", fmt="%.17g")
    payload = {
        "version": __version__,
        "config_sha256": config_hash,
        "kind": "end",
        "k": end.k,
        "m": end.m,
        "Y": end.Y,
        "Nx": end.Nx,
        "Ny": end.Ny,
        "report": report.to_dict(),
    }
    _write_json(outdir / "report.json", payload)
    return outdir / "end.csv", outdir / "report.json"


def load_end_artifact(path):
    """Rebuild an EndFunction from an artifact directory (or its report path)."""
    p = Path(path)
    if p.is_dir():
        rep_path, csv_path = p / "report.json", p / "end.csv"
    else:
        rep_path, csv_path = p, p.parent / "end.csv"
    if not rep_path.is_file() or not csv_path.is_file():
        raise ConfigError(f"artifact not found under {path}")
    meta = json.loads(rep_path.read_text())
    if meta.get("kind") != "end":
        raise ConfigError(f"{rep_path} is not a solved-end artifact")
    table = np.loadtxt(csv_path, delimiter=",", skiprows=1)
    if table.shape != (meta["Nx"] * meta["Ny"], 3):
        raise ConfigError("artifact CSV does not match its declared grid")
    u = table[:, 2].reshape(meta["Nx"], meta["Ny"])
    end = EndFunction(k=meta["k"], m=meta["m"], Y=meta["Y"], u=u)
    return end, meta


# ---------------------------------------------------------------------------
# commands


def cmd_solve_end(args):
    cfg, digest = load_config(args.config)
    bnd = cfg["boundary"]
    m = cfg.get("m", 1)
    nx = cfg.get("Nx", 128 * m)
    v = boundary_samples(m, nx, cos=tuple(bnd.get("cos", [])),
                         sin=tuple(bnd.get("sin", [])))
    end, report = newton_solve(
        cfg["k"], v, m=m, Y=cfg.get("Y"), Nx=nx, Ny=cfg.get("Ny"),
        tol=cfg.get("newton_tol", 1e-11), smallness=cfg.get("smallness"),
    )
    csv_path, rep_path = write_end_artifact(args.out, end, report, digest)
    print(f"converged in {report.iterations} iterations, "
          f"residual {report.final_residual:.3e}")
    print(f"wrote {csv_path} and {rep_path}")
    return 0


def cmd_expand(args):
    end, meta = load_end_artifact(args.artifact)
    series = extract_series(end, cutoff=args.omega)
    r, c = radius_centroid(series)
    finite = [v for v in series.info.remainder_rates.values() if np.isfinite(v)]
    payload = {
        "version": __version__,
        "config_sha256": meta.get("config_sha256"),
        "kind": "series",
        "cutoff": _fnum(series.cutoff),
        "r": _fnum(r),
        "c": [_fnum(c.real), _fnum(c.imag)],
        "terms": [
            {
                "lambda": _fnum(n / end.m),
                "mu": _fnum(mu),
                "re": _fnum(a.real),
                "im": _fnum(a.imag),
            }
            for (n, mu), a in series.rows()
        ],
        "remainder_exponent": _fnum(min(finite) if finite else np.inf),
        "remainder_rates": {
            str(n): _fnum(v) for n, v in sorted(series.info.remainder_rates.items())
        },
    }
    out = Path(args.out) / "series.json"
    _write_json(out, payload)
    print(f"r = {r:.12g}, c = {c.real:.12g} {c.imag:+.12g}i "
          f"({len(payload['terms'])} terms)")
    print(f"wrote {out}")
    return 0


def _end_record_payload(rec):
    zeta = rec.zeta
    return {
        "m": rec.m,
        "z": [_fnum(rec.z.real), _fnum(rec.z.imag)],
        "c": [_fnum(rec.c.real), _fnum(rec.c.imag)],
        "zeta": "infinity" if zeta is steiner.INFINITY
                else [_fnum(zeta.real), _fnum(zeta.imag)],
    }


def _relation_payload(data):
    rep = steiner.check_relations(data)
    return {
        "ends": [_end_record_payload(e) for e in data.ends],
        "residuals": {
            "balance": _fnum(rep.balance),
            "pairing": _fnum(rep.pairing),
            "reflection": _fnum(rep.reflection),
        },
        "tol": _fnum(rep.tol),
        "passed": rep.passed,
    }


def _example_data(args):
    if args.example is None:
        raise ConfigError("an example family (--example I|II|III) is required")
    if args.n is None:
        raise ConfigError("--n is required with --example")
    return steiner.symmetric_examples(args.example, args.n, m0=args.m0, m1=args.m1)


def cmd_steiner(args):
    if args.artifact is not None:
        end, meta = load_end_artifact(args.artifact)
        series = extract_series(end)
        _, c = radius_centroid(series)
        zeta = steiner.steiner_point(0.0, c)
        _, rate = steiner_geodesic(end, series)
        roundtrip = 0.0 if zeta is steiner.INFINITY else abs(zeta - 1.0 / np.conj(c))
        payload = {
            "version": __version__,
            "config_sha256": meta.get("config_sha256"),
            "kind": "steiner",
            "end": _end_record_payload(steiner.make_end(end.m, 0.0, c)),
            "approach_exponent": _fnum(rate),
            "roundtrip_residual": _fnum(roundtrip),
        }
        print(f"c = {c.real:.12g} {c.imag:+.12g}i, approach exponent {rate:.4g}")
    else:
        data = _example_data(args)
        payload = {
            "version": __version__,
            "kind": "steiner",
            "example": {"family": args.example, "n": args.n,
                        "m0": args.m0, "m1": args.m1},
            **_relation_payload(data),
        }
        print(f"family {args.example}, n = {args.n}: "
              f"relations {'pass' if payload['passed'] else 'FAIL'}")
    out = Path(args.out) / "steiner.json"
    _write_json(out, payload)
    print(f"wrote {out}")
    return 0


def cmd_relations(args):
    data = _example_data(args)
    payload = {
        "version": __version__,
        "kind": "relations",
        "example": {"family": args.example, "n": args.n,
                    "m0": args.m0, "m1": args.m1},
        **_relation_payload(data),
    }
    out = Path(args.out) / "relations.json"
    _write_json(out, payload)
    res = payload["residuals"]
    print(f"balance {res['balance']}, pairing {res['pairing']}, "
          f"reflection {res['reflection']}")
    print(f"wrote {out}")
    return 0


def cmd_flux(args):
    end, meta = load_end_artifact(args.artifact)
    profs = {
        "conormal": functionals.flux_conormal(end, args.a, args.b),
        "dnu": functionals.flux_dnu(end, args.a, args.b),
        "alpha": functionals.flux_alpha(end, args.a, args.b),
        "normal_cumulative": functionals.flux_normal_cumulative(end, args.a, args.b),
    }
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    names = list(profs)
    table = np.column_stack([end.y] + [profs[n].values for n in names])
    np.savetxt(outdir / "flux.csv", table, delimiter=",",
               header=",".join(["y"] + names), comments="", fmt="%.17g")
    payload = {
        "version": __version__,
        "config_sha256": meta.get("config_sha256"),
        "kind": "flux",
        "a": _fnum(args.a),
        "b": _fnum(args.b),
        "profiles": {
            n: {"limit": _fnum(p.limit), "rate": _fnum(p.rate),
                "fit_residual": _fnum(p.fit_residual),
                "window": [_fnum(p.window[0]), _fnum(p.window[1])]}
            for n, p in profs.items()
        },
    }
    _write_json(outdir / "flux.json", payload)
    for n in names:
        print(f"{n:>18}: limit {profs[n].limit: .6e}, rate {profs[n].rate:.4g}")
    print(f"wrote {outdir / 'flux.csv'} and {outdir / 'flux.json'}")
    return 0


def cmd_oracle_ode(args):
    if not 0.0 < args.k < 1.0:
        raise ConfigError(f"k must lie strictly between 0 and 1, got {args.k}")
    if args.u0 <= 0.0:
        raise ConfigError(f"u0 must be positive, got {args.u0}")
    prof = ode_radial_solve(args.k, args.u0, Y=args.Y, rtol=args.tol)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    table = np.column_stack([prof.y, prof.u, prof.uy])
    np.savetxt(outdir / "radial.csv", table, delimiter=",",
               header="y,u,uy", comments="", fmt="%.17g")
    payload = {
        "version": __version__,
        "kind": "radial",
        "k": _fnum(prof.k),
        "u0": _fnum(prof.u0),
        "slope0": _fnum(prof.slope0),
        "shots": prof.shots,
        "refined": prof.refined,
    }
    _write_json(outdir / "radial.json", payload)
    print(f"initial slope {prof.slope0:.12g} after {prof.shots} shots")
    print(f"wrote {outdir / 'radial.csv'} and {outdir / 'radial.json'}")
    return 0


def cmd_selftest(args):
    from .acceptance import CRITERIA, run_criteria, summarize

    numbers = None
    if args.criteria:
        try:
            numbers = sorted({int(t) for t in args.criteria.split(",")})
        except ValueError as e:
            raise ConfigError(f"bad criteria list {args.criteria!r}") from e
        bad = [n for n in numbers if n not in CRITERIA]
        if bad:
            raise ConfigError(f"unknown criteria {bad}")
    fault = "constant-bias" if args.fault_inject else None
    results = run_criteria(numbers, fault=fault)
    ok, lines = summarize(results)
    for r in results:
        print(r.report())
    print(lines[-1])
    if args.out:
        payload = {
            "version": __version__,
            "kind": "selftest",
            "seed": args.seed,
            "fault": fault,
            "ok": ok,
            "results": [
                {"number": r.number, "title": r.title, "passed": r.passed,
                 "expected_fail": r.expected_fail, "details": r.details}
                for r in results
            ],
        }
        _write_json(Path(args.out) / "selftest.json", payload)
        print(f"wrote {Path(args.out) / 'selftest.json'}")
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# parser


def build_parser():
    parser = _Parser(prog="ksurf",
                     description="constant extrinsic curvature ends: solver "
                                 "and verification toolkit")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve-end", help="solve the end equation from a config")
    p.add_argument("--config", required=True, help="JSON config path")
    p.add_argument("--out", default=".", help="artifact output directory")
    p.set_defaults(fn=cmd_solve_end)

    p = sub.add_parser("expand", help="asymptotic series of a solved end")
    p.add_argument("--artifact", required=True, help="solved-end artifact directory")
    p.add_argument("--omega", type=float, default=None, help="series cutoff rate")
    p.add_argument("--out", default=".")
    p.set_defaults(fn=cmd_expand)

    for name, fn in (("steiner", cmd_steiner), ("relations", cmd_relations)):
        p = sub.add_parser(name, help=f"{name} data for an end or example family")
        if name == "steiner":
            p.add_argument("--artifact", default=None)
        p.add_argument("--example", choices=("I", "II", "III"), default=None)
        p.add_argument("--n", type=int, default=None, help="ring size")
        p.add_argument("--m0", type=int, default=1, help="origin winding (family III)")
        p.add_argument("--m1", type=int, default=1, help="ring winding (family III)")
        p.add_argument("--out", default=".")
        p.set_defaults(fn=fn)

    p = sub.add_parser("flux", help="Killing flux profiles of a solved end")
    p.add_argument("--artifact", required=True)
    p.add_argument("--a", type=float, default=1.0)
    p.add_argument("--b", type=float, default=0.0)
    p.add_argument("--out", default=".")
    p.set_defaults(fn=cmd_flux)

    p = sub.add_parser("oracle-ode", help="radial shooting oracle")
    p.add_argument("--k", type=float, required=True)
    p.add_argument("--u0", type=float, required=True)
    p.add_argument("--Y", type=float, default=None)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--out", default=".")
    p.set_defaults(fn=cmd_oracle_ode)

    p = sub.add_parser("selftest", help="run the acceptance criteria")
    p.add_argument("--criteria", default=None, help="comma-separated subset")
    p.add_argument("--fault-inject", action="store_true",
                   help="bias the constant-end check to demonstrate a failure")
    p.add_argument("--seed", type=int, default=0,
                   help="recorded in the report; the gates use pinned seeds")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_selftest)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as e:
        print(f"ksurf: config error: {e}", file=sys.stderr)
        return 3
    except KsurfError as e:
        print(f"ksurf: numerical failure: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
