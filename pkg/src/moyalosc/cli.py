"""Batch command line: axiom suites, heat-trace tables, trace
functionals, residue tables and spectral-action reports.

Reports are deterministic: the same config and flags give byte-identical
JSON except for the meta block, which isolates the timestamp and wall
times.  Every numeric row carries a formula id naming what was computed
and, when an oracle ran, the oracle id and the comparison residual.
Config sections are schema-checked and unknown keys are rejected; the
MOYALOSC_CONFIG environment variable supplies a default config path.
"""

import argparse
import csv
import json
import math
import os
import subprocess
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import mpmath
import numpy as np
import tomli

from . import __version__, action, dirac, model
from . import fock as fk
from . import gausspoly as gp
from . import traces as tr
from .errors import DomainError, ParameterError
from .reporting import make_record, residual_record, _num

ENV_CONFIG = "MOYALOSC_CONFIG"

_TOP_KEYS = {"model", "truncation", "oracle", "fields", "output"}
_MODEL_KEYS = {"d", "omega", "theta"}
_TRUNC_KEYS = {"n_max", "margin"}
_ORACLE_KEYS = {"n_max", "tol_abs", "tol_rel"}
_OUTPUT_KEYS = {"json", "csv"}
_FIELD_KEYS = {"M", "factorized", "phi"} | {
    "%s%d" % (s, i) for s in "AB" for i in range(1, 5)
}


@dataclass
class RunConfig:
    """Parsed config file sections; all optional, schema-checked."""

    model: dict
    truncation: dict
    oracle: dict
    fields: dict
    output: dict


def load_run_config(path):
    if path is None:
        path = os.environ.get(ENV_CONFIG)
    if path is None:
        return RunConfig({}, {}, {}, {}, {})
    with open(path, "rb") as fh:
        raw = tomli.load(fh)
    unknown = set(raw) - _TOP_KEYS
    if unknown:
        raise ParameterError("unknown config sections: %s" % sorted(unknown))

    def sect(name, keys):
        sec = raw.get(name, {})
        bad = set(sec) - keys
        if bad:
            raise ParameterError("unknown [%s] keys: %s" % (name, sorted(bad)))
        return sec

    return RunConfig(
        model=sect("model", _MODEL_KEYS),
        truncation=sect("truncation", _TRUNC_KEYS),
        oracle=sect("oracle", _ORACLE_KEYS),
        fields=sect("fields", _FIELD_KEYS),
        output=sect("output", _OUTPUT_KEYS),
    )


def _params(args, rc, default_d):
    sec = dict(rc.model)
    if getattr(args, "d", None) is not None:
        sec["d"] = args.d
    if getattr(args, "omega", None) is not None:
        sec["omega"] = args.omega
    if getattr(args, "theta", None) is not None:
        sec["theta"] = _float_list(args.theta)
    sec.setdefault("d", default_d)
    sec.setdefault("omega", 1.0)
    sec.setdefault("theta", [2.0] * (int(sec["d"]) // 2))
    return model.from_config(sec)


def _n_max(args, rc, default):
    if args.nmax is not None:
        return int(args.nmax)
    return int(rc.truncation.get("n_max", default))


def _oracle_n_max(args, rc, default):
    if args.nmax is not None:
        return int(args.nmax)
    return int(rc.oracle.get("n_max", default))


def _float_list(text):
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    return [float(v) for v in str(text).split(",") if v != ""]


def _int_list(text):
    return [int(v) for v in str(text).split(",") if v != ""]


def load_gausspoly_file(path, default_dim):
    """Read a symbol from a TOML file with keys dim and terms."""
    with open(path, "rb") as fh:
        raw = tomli.load(fh)
    unknown = set(raw) - {"dim", "terms"}
    if unknown:
        raise ParameterError("unknown symbol-file keys: %s" % sorted(unknown))
    dim = int(raw.get("dim", default_dim))
    return gp.from_config_terms(dim, raw.get("terms", []))


def fields_from_config(params, sec, M_flag=None):
    """Build the field configuration from a [fields] table; without one
    the shipped example configuration is used."""
    if not sec:
        return action.example_config(params, 1.0 if M_flag is None else M_flag)
    M = float(sec.get("M", 0.0) if M_flag is None else M_flag)
    comps = {}
    for key in sorted(_FIELD_KEYS - {"M", "factorized"}):
        entries = sec.get(key)
        if entries is None:
            comps[key] = gp.GaussPoly.zero(4)
        else:
            comps[key] = gp.from_config_terms(4, entries)
    cfg = action.FieldConfig(
        params,
        tuple(comps["A%d" % i] for i in range(1, 5)),
        tuple(comps["B%d" % i] for i in range(1, 5)),
        comps["phi"],
        M,
    )
    if sec.get("factorized"):
        for key in sorted(_FIELD_KEYS - {"M", "factorized"}):
            for coeff, alpha, A, b in comps[key].terms:
                off = np.max(np.abs(A[:2, 2:])) + np.max(np.abs(A[2:, :2]))
                if off > 0.0:
                    raise ParameterError(
                        "[fields] declares factorized = true but %s has a "
                        "plane-coupling quadratic form" % key
                    )
    return cfg


# ----------------------------------------------------------------------
# report emission


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, complex):
        return _num(obj)
    if isinstance(obj, np.generic):
        return _jsonable(obj.item())
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    return obj


def emit(args, command, payload, csv_columns, csv_rows, started):
    """Write the report per the output flags.

    The JSON body is deterministic; the timestamp and wall time live in
    the meta block so byte comparison of everything else is meaningful.
    """
    report = dict(payload)
    report["command"] = command
    report["package_version"] = __version__
    body = _jsonable(report)
    body["meta"] = {
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
        "seconds": round(time.perf_counter() - started, 3),
    }
    json_path = args.json or args.run_config.output.get("json")
    csv_path = args.csv or args.run_config.output.get("csv")
    if json_path:
        with open(json_path, "w") as fh:
            json.dump(body, fh, sort_keys=True, indent=2)
            fh.write("\n")
    if csv_path:
        with open(csv_path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(csv_columns)
            for row in csv_rows:
                writer.writerow(row)
    if not json_path and not csv_path:
        for row in csv_rows:
            print("  ".join(str(v) for v in row))


def _record_rows(records):
    cols = [
        "check_id", "lhs", "rhs", "abs_err", "rel_err",
        "tol_abs", "tol_rel", "passed", "formula",
    ]
    rows = []
    for r in records:
        rows.append([
            r.check_id, _num(r.lhs), _num(r.rhs), r.abs_err, r.rel_err,
            r.tol_abs, r.tol_rel, r.passed, r.check_id,
        ])
    return cols, rows


def _record_payload(records):
    out = []
    for r in records:
        d = r.to_dict()
        d.pop("seconds", None)
        d["formula"] = r.check_id
        out.append(d)
    return out


def _random_gaussian(dim, rng):
    m = rng.standard_normal((dim, dim))
    A = np.eye(dim) + 0.25 * (m + m.T) @ (m + m.T).T * 0.1
    b = 0.3 * rng.standard_normal(dim)
    return gp.GaussPoly.gaussian(dim, A, b)


# ----------------------------------------------------------------------
# subcommands


def cmd_axioms(args):
    started = time.perf_counter()
    rc = args.run_config
    params = _params(args, rc, default_d=2)
    n_max = _n_max(args, rc, 16)
    f = g = None
    if args.seed is not None:
        rng = np.random.default_rng(args.seed)
        f = _random_gaussian(params.d, rng)
        g = _random_gaussian(params.d, rng)
    records = dirac.axiom_suite(params, n_max=n_max, f=f, g=g)

    # closed-form vacuum traces at a tail-bounded cutoff
    t_chk = 0.5
    n_tail = fk.heat_trace_cutoff(params, t_chk, 1e-9)
    records.append(make_record(
        "vacuum-heat-trace-closed-form",
        fk.truncated_heat_trace(params, t_chk, n_tail),
        model.heat_trace_vacuum(params, t_chk, args.precision),
        tol_rel=1e-8,
        cutoffs={"n_max": n_tail, "t": t_chk},
    ))
    wt = params.omega * t_chk
    records.append(make_record(
        "dirac-square-heat-trace-closed-form",
        dirac.heat_trace_squared(params, t_chk, n_tail),
        (math.cosh(wt) / math.sinh(wt)) ** params.d,
        tol_rel=1e-8,
        cutoffs={"n_max": n_tail, "t": t_chk},
    ))

    if args.negative_control:
        # pair the second Dirac's commutator with the first Gamma set;
        # the residual is order one and the record fails by design
        import moyalosc.clifford as cl

        nfock = fk.build_fock(params, min(n_max, 12))
        cliff = cl.build_clifford(params)
        d2 = dirac.build_dirac(2, nfock, cliff)
        probe = f if f is not None else gp.GaussPoly.gaussian(
            params.d, np.eye(params.d)
        )
        rep = dirac.commutator_with_function(d2, probe, margin=2, mismatch=True)
        records.append(residual_record(
            "negative-control-gamma-mismatch",
            rep["residual"],
            1e-7,
            cutoffs={"n_max": nfock.n_max, "mismatch": 1},
        ))

    cols, rows = _record_rows(records)
    n_pass = sum(1 for r in records if r.passed)
    payload = {
        "records": _record_payload(records),
        "n_records": len(records),
        "n_passed": n_pass,
        "all_passed": n_pass == len(records),
        "model": {"d": params.d, "omega": params.omega,
                  "theta": list(params.theta_blocks)},
        "n_max": n_max,
    }
    emit(args, "axioms", payload, cols, rows, started)
    return 0 if n_pass == len(records) else 1


def cmd_heat_trace(args):
    started = time.perf_counter()
    rc = args.run_config
    params = _params(args, rc, default_d=2)
    ts = _float_list(args.t)
    if not ts:
        raise ParameterError("need at least one t value")
    if any(t <= 0 for t in ts):
        raise DomainError("heat trace needs t > 0")
    f = None
    if args.f:
        f = load_gausspoly_file(args.f, params.d)

    def vac_rows(t):
        h_closed = model.heat_trace_vacuum(params, t, args.precision)
        wt = params.omega * t
        if args.precision == "extended":
            with mpmath.workdps(50):
                d_closed = float(mpmath.coth(wt) ** params.d)
        else:
            d_closed = (math.cosh(wt) / math.sinh(wt)) ** params.d
        out = [
            {"t": t, "trace": "schroedinger-vacuum", "value": h_closed,
             "formula": "vacuum-heat-trace-closed-form"},
            {"t": t, "trace": "dirac-square-vacuum", "value": d_closed,
             "formula": "dirac-square-heat-trace-closed-form"},
        ]
        if args.oracle:
            n_tail = fk.heat_trace_cutoff(params, t, 1e-9)
            for row, mat in zip(out, (
                fk.truncated_heat_trace(params, t, n_tail),
                dirac.heat_trace_squared(params, t, n_tail),
            )):
                row["oracle"] = "fock-matrix-truncated-trace"
                row["oracle_value"] = mat
                row["abs_err"] = abs(mat - row["value"])
                row["rel_err"] = row["abs_err"] / abs(row["value"])
                row["oracle_n_max"] = n_tail
        return out

    def loc_rows(t):
        val = tr.localized_heat_trace(params, f, args.which, t)
        row = {"t": t, "trace": "localized-dirac-square", "value": _num(val),
               "formula": "localized-heat-trace-closed-form"}
        if args.oracle:
            n_or = _oracle_n_max(args, rc, 24)
            mat = tr.trace_functional_oracle(params, f, (), t, n_or)
            mat *= (2.0 * math.cosh(params.omega * t)) ** params.d
            row["oracle"] = "fock-matrix-trace"
            row["oracle_value"] = _num(mat)
            row["abs_err"] = abs(mat - val)
            row["rel_err"] = row["abs_err"] / max(abs(val), 1e-300)
            row["oracle_n_max"] = n_or
        return [row]

    work = loc_rows if f is not None else vac_rows
    with ThreadPoolExecutor(max_workers=min(4, len(ts))) as pool:
        rows = [r for chunk in pool.map(work, ts) for r in chunk]

    cols = ["t", "trace", "value", "oracle_value", "abs_err", "rel_err",
            "formula", "oracle"]
    csv_rows = [[r.get(c, "") for c in cols] for r in rows]
    payload = {
        "rows": rows,
        "model": {"d": params.d, "omega": params.omega,
                  "theta": list(params.theta_blocks)},
        "precision": args.precision,
    }
    emit(args, "heat-trace", payload, cols, csv_rows, started)
    return 0


def cmd_trace_functional(args):
    started = time.perf_counter()
    rc = args.run_config
    params = _params(args, rc, default_d=2)
    if not args.f:
        raise ParameterError("trace-functional needs --f FILE")
    f = load_gausspoly_file(args.f, params.d)
    indices = tuple(_int_list(args.indices)) if args.indices else ()
    spec = tr.TraceFunctionalSpec(params, f, indices, args.t, args.tilde_last)
    val = tr.trace_functional(spec, pairing=args.pairing)
    formula = ("tilde-trace-closed-form" if args.tilde_last
               else "proposition-trace-closed-form")
    row = {"t": args.t, "indices": list(indices), "value": _num(val),
           "pairing": args.pairing, "tilde_last": args.tilde_last,
           "formula": formula}
    if args.oracle:
        n_or = _oracle_n_max(args, rc, 24)
        mat = tr.trace_functional_oracle(
            params, f, indices, args.t, n_or, tilde_last=args.tilde_last
        )
        row["oracle"] = "fock-matrix-trace"
        row["oracle_value"] = _num(mat)
        row["abs_err"] = abs(mat - val)
        row["rel_err"] = row["abs_err"] / max(abs(val), 1e-300)
        row["oracle_n_max"] = n_or
    cols = ["t", "indices", "value", "oracle_value", "abs_err", "rel_err",
            "pairing", "formula", "oracle"]
    csv_rows = [[row.get(c, "") for c in cols]]
    payload = {"rows": [row],
               "model": {"d": params.d, "omega": params.omega,
                         "theta": list(params.theta_blocks)}}
    emit(args, "trace-functional", payload, cols, csv_rows, started)
    return 0


def cmd_residues(args):
    started = time.perf_counter()
    rc = args.run_config
    params = _params(args, rc, default_d=2)
    f = load_gausspoly_file(args.f, params.d) if args.f else None
    d = params.d
    lattice = sorted(tr._pole_lattice(params, f is not None), reverse=True)
    poles = lattice[:3]
    rows = []
    for z in poles:
        res = tr.zeta_residue(params, f, args.which, z, depth=args.depth)
        rows.append({"pole": z, "residue": _num(res),
                     "formula": "zeta-residue-mellin-dictionary"})
    if f is not None:
        dx = tr.dixmier_value(params, f, which=args.which)
        row = {"pole": d, "residue": _num(dx),
               "formula": "dixmier-integral-route",
               "oracle": "zeta-residue-route"}
        if args.oracle:
            n_or = _oracle_n_max(args, rc, 24)
            mz = tr.matrix_zeta(params, f, args.which, n_or)
            row["matrix_extrapolation"] = mz["pole_coefficient"]
            row["matrix_rel_err"] = abs(
                mz["pole_coefficient"] - dx.real
            ) / max(abs(dx), 1e-300)
            row["oracle"] = "matrix-zeta-hurwitz-completion"
            row["oracle_n_max"] = n_or
        rows.append(row)
    cols = ["pole", "residue", "matrix_extrapolation", "matrix_rel_err",
            "formula", "oracle"]
    csv_rows = [[r.get(c, "") for c in cols] for r in rows]
    payload = {"rows": rows, "which": args.which,
               "localized": f is not None,
               "model": {"d": params.d, "omega": params.omega,
                         "theta": list(params.theta_blocks)}}
    emit(args, "residues", payload, cols, csv_rows, started)
    return 0


def cmd_spectral_action(args):
    started = time.perf_counter()
    rc = args.run_config
    params = _params(args, rc, default_d=4)
    cfg = fields_from_config(params, rc.fields, args.M)
    chi = (action.sharp_moments() if args.chi == "sharp"
           else action.exponential_moments())
    lams = _float_list(args.lam)
    if any(l <= 0 for l in lams):
        raise DomainError("cutoff scales must be positive")

    lau = action.heat_trace_laurent(cfg)
    laurent_rows = []
    for row in lau["rows"]:
        laurent_rows.append({
            "power": row["power"],
            "vacuum": _num(complex(row["vacuum"])),
            "field": _num(complex(row["field"])),
            "total": _num(complex(row["total"])),
            "formula": "heat-trace-laurent-closed-form",
        })

    def one(lam):
        rep = action.spectral_action(cfg, lam, chi)
        return {
            "lambda": lam,
            "raw_total": _num(rep["raw_total"]),
            "completed_square_total": _num(rep["completed_square_total"]),
            "split_difference": abs(rep["split_difference"]),
            "kappa": rep["kappa"],
            "formula": "cutoff-moment-laurent-mapping",
        }

    with ThreadPoolExecutor(max_workers=min(4, len(lams))) as pool:
        sweep = list(pool.map(one, lams))

    payload = {
        "laurent_rows": laurent_rows,
        "sweep": sweep,
        "chi": args.chi,
        "M": cfg.M,
        "doubled": True,
        "model": {"d": params.d, "omega": params.omega,
                  "theta": list(params.theta_blocks)},
    }
    if args.oracle:
        fit = action.duhamel_laurent_fit(cfg)
        checks = []
        for q in (-1, 0):
            ref = complex(lau["field"][q])
            got = fit[q]
            checks.append({
                "power": q,
                "closed": _num(ref),
                "fit": _num(got),
                "rel_err": abs(got - ref) / max(abs(ref), 1e-300),
                "formula": "field-laurent-closed-form",
                "oracle": "termwise-duhamel-laurent-fit",
            })
        payload["oracle_rows"] = checks

    cols = ["power", "vacuum", "field", "total"]
    csv_rows = [[r["power"], r["vacuum"], r["field"], r["total"]]
                for r in laurent_rows]
    emit(args, "spectral-action", payload, cols, csv_rows, started)
    return 0


def cmd_verify(args):
    """Run the acceptance suite through pytest."""
    target = os.path.join(os.getcwd(), "tests", "test_acceptance.py")
    if not os.path.exists(target):
        print("acceptance tests not found at %s" % target, file=sys.stderr)
        return 2
    return subprocess.call(
        [sys.executable, "-m", "pytest", "-v", target]
    )


# ----------------------------------------------------------------------
# argument plumbing


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="TOML run config path")
    common.add_argument("--json", help="write the JSON report here")
    common.add_argument("--csv", help="write the CSV table here")
    common.add_argument("--nmax", type=int, help="matrix cutoff override")
    common.add_argument("--oracle", action="store_true",
                        help="also run the matrix oracle per row")
    common.add_argument("--precision", choices=("double", "extended"),
                        default="double")
    common.add_argument("--seed", type=int,
                        help="seed for randomized probe symbols")
    common.add_argument("--negative-control", action="store_true",
                        dest="negative_control",
                        help="append a deliberately mismatched check")
    common.add_argument("--d", type=int, help="dimension override")
    common.add_argument("--omega", type=float, help="frequency override")
    common.add_argument("--theta", help="deformation blocks, comma separated")

    ap = argparse.ArgumentParser(
        prog="moyalosc",
        description="verification laboratory for the oscillator spectral "
                    "triple on the deformed plane",
    )
    sub = ap.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("axioms", parents=[common],
                       help="run the spectral-triple condition battery")
    p.set_defaults(func=cmd_axioms)

    p = sub.add_parser("heat-trace", parents=[common],
                       help="closed-form heat traces on a t grid")
    p.add_argument("--vacuum", action="store_true",
                   help="vacuum traces (default when no --f)")
    p.add_argument("--f", help="symbol file for the localized trace")
    p.add_argument("--which", type=int, default=1, choices=(1, 2))
    p.add_argument("--t", default="0.5,1.0", help="comma separated t grid")
    p.set_defaults(func=cmd_heat_trace)

    p = sub.add_parser("trace-functional", parents=[common],
                       help="derivative-slot trace functional of a symbol")
    p.add_argument("--f", required=True, help="symbol file")
    p.add_argument("--indices", default="", help="1-based slots, e.g. 1,2")
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--tilde-last", action="store_true", dest="tilde_last",
                   help="replace the last slot by the dual derivative")
    p.add_argument("--pairing", choices=("wick", "consecutive"),
                   default="wick")
    p.set_defaults(func=cmd_trace_functional)

    p = sub.add_parser("residues", parents=[common],
                       help="zeta residues and the Dixmier value")
    p.add_argument("--f", help="symbol file (omit for the vacuum lattice)")
    p.add_argument("--which", type=int, default=1, choices=(1, 2))
    p.add_argument("--depth", type=int, default=2)
    p.set_defaults(func=cmd_residues)

    p = sub.add_parser("spectral-action", parents=[common],
                       help="Laurent table and cutoff action sweep")
    p.add_argument("--lambda", dest="lam", default="10",
                   help="comma separated cutoff scales")
    p.add_argument("--chi", choices=("sharp", "exp"), default="sharp")
    p.add_argument("--M", type=float, help="mass parameter override")
    p.set_defaults(func=cmd_spectral_action)

    p = sub.add_parser("verify", parents=[common],
                       help="run the acceptance suite via pytest")
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        args.run_config = load_run_config(args.config)
        return args.func(args)
    except (ParameterError, DomainError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except (OSError, tomli.TOMLDecodeError) as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
