"""Command-line frontend: JSON documents in, one JSON report out.

Every command reads its inputs from JSON files, prints a report
envelope (command, status, margins and certificates when present, seed,
tolerances, wall time) to stdout, and exits 0 on success, 64 on a usage
error, 65 on malformed or invalid input data, and 70 when a solver gave
up and ``--strict`` was set.  ``batch`` runs a list of inline job
documents, concurrently up to the MCONVEX_THREADS cap; reports come
back in input order, so reruns with the same seeds are reproducible
byte for byte.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
import time

import numpy as np

from . import acceptance
from ._jsonio import (
    SchemaError,
    decode_body,
    decode_diagonal,
    decode_matrix,
    decode_tuple,
    dump_report,
    polygon_svg,
    to_jsonable,
    trace_svg,
)
from .errors import MConvexError
from .geometry import (
    essential_range_hull,
    extreme_points,
    is_simplex,
    jnr_sandwich,
)
from .models import (
    NormalTuple,
    block_diagonal_model,
    essential_spectrum_diag,
    extreme_spectral_compression,
    joint_spectrum,
    sw_perturbation,
    verify_complete_isometry,
    verify_local_sw,
)
from .ranges import (
    calibrate_choi_li,
    choi_li_equiv_check,
    is_matrix_extreme_free_symmetric,
    is_matrix_extreme_free_unitary,
    kmax_member,
    kmin_member,
    mrange_equal,
    theta_min_alpha,
    ucp_member,
)

EX_OK = 0
EX_USAGE = 64
EX_DATAERR = 65
EX_UNAVAILABLE = 70


class UsageError(Exception):
    pass


@dataclasses.dataclass
class JobSpec:
    """One unit of CLI work: a command, its parsed inputs, its options."""

    command: str
    inputs: dict
    options: dict


def _opt(job: JobSpec, key: str, default):
    v = job.options.get(key)
    return default if v is None else v


def _tol(job: JobSpec, default: float = 1e-7) -> float:
    return float(_opt(job, "tol", default))


def _seed(job: JobSpec) -> int:
    return int(_opt(job, "seed", 0))


def _need(job: JobSpec, key: str):
    if key not in job.inputs or job.inputs[key] is None:
        raise UsageError(f"command {job.command!r} needs the {key!r} input")
    return job.inputs[key]


def _points_array(doc) -> np.ndarray:
    pts = np.atleast_2d(np.asarray(doc, dtype=float))
    if pts.size == 0:
        raise SchemaError("empty point list")
    return pts


def _membership_payload(res) -> dict:
    payload = {
        "status": res.status.value,
        "margin": res.margin,
        "detail": res.detail,
        "has_unknown": res.status.value == "Unknown",
    }
    if res.certificate is not None:
        payload["certificate"] = res.certificate
    return payload


def _run_jnr(job: JobSpec) -> dict:
    t = decode_tuple(_need(job, "tuple"))
    m = int(_opt(job, "grid", 64))
    sandwich = jnr_sandwich(t, m=m)
    svg = job.options.get("svg")
    if svg:
        polygon_svg(
            [
                (sandwich.inner.vertices, "#1f77b4"),
                (sandwich.outer.vertices, "#d62728"),
            ],
            svg,
        )
    return {
        "inner": sandwich.inner.vertices,
        "outer": sandwich.outer.vertices,
        "hausdorff_bound": sandwich.hausdorff_bound,
        "directions": m,
    }


def _run_member(job: JobSpec) -> dict:
    kind = _need(job, "kind")
    a = decode_tuple(_need(job, "tuple"))
    tol = _tol(job)
    if kind == "kmin":
        res = kmin_member(
            decode_body(_need(job, "body")),
            a,
            tol=tol,
            m_grid=int(_opt(job, "grid", 96)),
            max_iter=int(_opt(job, "max_iter", 50000)),
        )
    elif kind == "kmax":
        res = kmax_member(decode_body(_need(job, "body")), a, tol=tol)
    elif kind == "ucp":
        x = decode_tuple(_need(job, "range_of"))
        res = ucp_member(x, a, tol=tol, max_iter=int(_opt(job, "max_iter", 50000)))
    else:
        raise UsageError(f"unknown member kind {kind!r} (ucp | kmin | kmax)")
    return _membership_payload(res)


def _run_equal(job: JobSpec) -> dict:
    x = decode_tuple(_need(job, "x"))
    y = decode_tuple(_need(job, "y"))
    top = int(_opt(job, "level", 3))
    probes = int(_opt(job, "grid", 50))
    equal, reports = mrange_equal(
        x, y, levels=tuple(range(1, top + 1)), tol=_tol(job),
        probes=probes, seed=_seed(job),
    )
    unresolved = sum(r.get("unresolved", 0) for r in reports)
    return {
        "status": "Equal" if equal else "Unequal",
        "equal": equal,
        "levels": reports,
        "has_unknown": unresolved > 0,
    }


def _run_theta(job: JobSpec) -> dict:
    body = decode_body(_need(job, "body"))
    t = decode_tuple(_need(job, "tuple"))
    trace: list = []
    est = theta_min_alpha(body, t, tol=_tol(job, 1e-2), trace=trace)
    svg = job.options.get("svg")
    if svg:
        trace_svg([(i, hi - lo) for i, (lo, hi) in enumerate(trace)], svg)
    return {
        "lower": est.lower,
        "upper": est.upper,
        "witness_point": est.witness_point,
        "trace": trace,
    }


def _run_extreme(job: JobSpec) -> dict:
    kind = _need(job, "kind")
    if kind == "points":
        pts = _points_array(_need(job, "points"))
        ext = extreme_points(pts, tol=_tol(job, 1e-9))
        return {"extremes": ext, "count": int(ext.shape[0])}
    if kind == "simplex":
        pts = _points_array(_need(job, "points"))
        flag, info = is_simplex(pts, tol=_tol(job, 1e-9))
        return {
            "status": "Simplex" if flag else "NotSimplex",
            "is_simplex": flag,
            "rank_data": info,
        }
    if kind in ("free-sym", "free-uni"):
        t = decode_tuple(_need(job, "tuple"))
        test = (
            is_matrix_extreme_free_symmetric
            if kind == "free-sym"
            else is_matrix_extreme_free_unitary
        )
        accepted, reason = test(t)
        return {
            "status": "Extreme" if accepted else "NotExtreme",
            "accepted": accepted,
            "reason": reason,
        }
    raise UsageError(
        f"unknown extreme kind {kind!r} (points | simplex | free-sym | free-uni)"
    )


def _run_choili(job: JobSpec) -> dict:
    y = decode_matrix(_need(job, "y"))
    rep = choi_li_equiv_check(y, tol=_tol(job, 1e-6))
    return {
        "status": "Consistent" if rep["consistent"] else "Inconsistent",
        "excluded": rep["excluded"],
        "square_min": rep["square_min"],
        "disc_radius": rep["radius"],
        "calibration": rep["calibration"],
        "has_unknown": rep["square_min"].status.value == "Unknown",
    }


def _run_model(job: JobSpec) -> dict:
    kind = _need(job, "kind")
    if kind == "normal":
        t = NormalTuple(decode_tuple(_need(job, "tuple")))
        model = extreme_spectral_compression(t)
        check = verify_complete_isometry(
            t, model, p=int(_opt(job, "level", 2)), trials=50, seed=_seed(job)
        )
        return {
            "joint_spectrum": joint_spectrum(t),
            "extreme_set": model.extreme_set,
            "projector_rank": model.projector_rank,
            "compressed": model.compressed,
            "isometry_check": check,
        }
    if kind == "blockdiag":
        docs = _need(job, "candidates")
        if not isinstance(docs, list) or not docs:
            raise SchemaError("candidates must be a nonempty list of tuples")
        model = block_diagonal_model([decode_tuple(doc) for doc in docs])
        return {
            "summands": list(model.summands),
            "direct_sum": model.direct_sum,
            "report": model.report,
        }
    raise UsageError(f"unknown model kind {kind!r} (normal | blockdiag)")


def _run_sw(job: JobSpec) -> dict:
    kind = _need(job, "kind")
    t = decode_diagonal(_need(job, "diag"))
    if kind == "ess":
        pts = essential_spectrum_diag(t, tol=_tol(job, 1e-9))
        return {"points": pts, "count": int(pts.shape[0])}
    if kind == "perturb":
        perturbed, report = sw_perturbation(t)
        return {"perturbed": perturbed, "report": report}
    if kind == "verify":
        if job.inputs.get("perturbed") is not None:
            perturbed = decode_diagonal(job.inputs["perturbed"])
        else:
            perturbed, _ = sw_perturbation(t)
        out = verify_local_sw(
            t,
            perturbed,
            q=int(_opt(job, "level", 2)),
            samples=int(_opt(job, "grid", 50)),
            seed=_seed(job),
            tol=_tol(job),
        )
        unresolved = sum(v["unresolved"] for v in out["levels"].values())
        out["status"] = "Equal" if out["equal"] else "Unequal"
        out["has_unknown"] = unresolved > 0
        return out
    raise UsageError(f"unknown sw kind {kind!r} (ess | perturb | verify)")


def _run_toeplitz(job: JobSpec) -> dict:
    doc = _need(job, "samples")
    if not isinstance(doc, list) or len(doc) < 3:
        raise SchemaError("toeplitz needs at least three symbol samples")
    samples = decode_matrix([doc]).ravel()
    hull, extremes = essential_range_hull(samples)
    svg = job.options.get("svg")
    if svg:
        polygon_svg([(hull, "#1f77b4")], svg)
    return {"hull": hull, "extremes": extremes}


def _run_verify_suite(job: JobSpec) -> dict:
    workers = os.environ.get("MCONVEX_THREADS")
    results = acceptance.run_all(int(workers) if workers else None)
    for r in results:
        line = "PASS" if r.passed else "FAIL"
        print(f"{line} {r.name} ({r.seconds:.1f}s): {r.detail}", file=sys.stderr)
    return {
        "status": "Pass" if all(r.passed for r in results) else "Fail",
        "criteria": results,
    }


_HANDLERS = {
    "jnr": _run_jnr,
    "member": _run_member,
    "equal": _run_equal,
    "theta": _run_theta,
    "extreme": _run_extreme,
    "choili": _run_choili,
    "model": _run_model,
    "sw": _run_sw,
    "toeplitz": _run_toeplitz,
    "verify-suite": _run_verify_suite,
}


def execute(job: JobSpec) -> tuple[dict, int]:
    """Run one job and assemble the report envelope plus an exit code."""
    if job.command not in _HANDLERS:
        raise UsageError(f"unknown command {job.command!r}")
    t0 = time.perf_counter()
    payload = _HANDLERS[job.command](job)
    has_unknown = bool(payload.pop("has_unknown", False))
    report = {
        "command": job.command,
        "status": payload.pop("status", "ok"),
        "seed": _seed(job),
        "tolerances": {
            k: job.options[k]
            for k in ("tol", "max_iter", "level", "grid")
            if job.options.get(k) is not None
        },
        "wall_time_s": round(time.perf_counter() - t0, 6),
    }
    report.update(payload)
    code = EX_OK
    if job.command == "verify-suite" and report["status"] != "Pass":
        code = 1
    if has_unknown and job.options.get("strict"):
        code = EX_UNAVAILABLE
    return report, code


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--tol", type=float, default=None, help="tolerance override")
    sub.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    sub.add_argument("--max-iter", type=int, default=None, dest="max_iter")
    sub.add_argument("--level", type=int, default=None, help="level / replication")
    sub.add_argument(
        "--grid", type=int, default=None, help="direction grid or probe count"
    )
    sub.add_argument("--svg", default=None, metavar="PATH", help="write an SVG plot")
    sub.add_argument(
        "--json", default=None, metavar="PATH", help="also write the report here"
    )
    sub.add_argument(
        "--strict",
        action="store_true",
        help="exit 70 when any verdict is Unknown",
    )


def _build_parser() -> _Parser:
    parser = _Parser(prog="mconvex", description=__doc__)
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("jnr", help="joint numerical range sandwich")
    p.add_argument("--tuple", required=True, dest="tuple_path")
    _add_common(p)

    p = subs.add_parser("member", help="membership queries")
    p.add_argument("--kind", required=True, choices=["ucp", "kmin", "kmax"])
    p.add_argument("--tuple", required=True, dest="tuple_path")
    p.add_argument("--body", dest="body_path", help="body for kmin/kmax")
    p.add_argument(
        "--range-of", dest="range_of_path", help="tuple whose range to test (ucp)"
    )
    _add_common(p)

    p = subs.add_parser("equal", help="matrix range equality probing")
    p.add_argument("--x", required=True, dest="x_path")
    p.add_argument("--y", required=True, dest="y_path")
    _add_common(p)

    p = subs.add_parser("theta", help="scaling constant bisection")
    p.add_argument("--body", required=True, dest="body_path")
    p.add_argument("--tuple", required=True, dest="tuple_path")
    _add_common(p)

    p = subs.add_parser("extreme", help="extreme points / extremality tests")
    p.add_argument(
        "--kind", required=True, choices=["points", "simplex", "free-sym", "free-uni"]
    )
    p.add_argument("--points", dest="points_path", help="JSON array of points")
    p.add_argument("--tuple", dest="tuple_path", help="tuple for free-* kinds")
    _add_common(p)

    p = subs.add_parser("choili", help="square/disc transform cross-check")
    p.add_argument("--y", required=True, dest="y_path", help="matrix JSON")
    _add_common(p)

    p = subs.add_parser("model", help="spectral or block-diagonal models")
    p.add_argument("--kind", required=True, choices=["normal", "blockdiag"])
    p.add_argument("--tuple", dest="tuple_path", help="tuple for kind=normal")
    p.add_argument(
        "--candidates", dest="candidates_path", help="JSON array of tuples"
    )
    _add_common(p)

    p = subs.add_parser("sw", help="diagonal-tuple perturbation machinery")
    p.add_argument("--kind", required=True, choices=["ess", "perturb", "verify"])
    p.add_argument("--diag", required=True, dest="diag_path")
    p.add_argument("--perturbed", dest="perturbed_path")
    _add_common(p)

    p = subs.add_parser("toeplitz", help="essential range hull of symbol samples")
    p.add_argument("--samples", required=True, dest="samples_path")
    _add_common(p)

    p = subs.add_parser("verify-suite", help="run the acceptance criteria")
    _add_common(p)

    p = subs.add_parser("batch", help="run a JSON list of inline jobs")
    p.add_argument("--jobs", required=True, dest="jobs_path")
    _add_common(p)

    return parser


def _load_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fp:
            return json.load(fp)
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path} is not valid JSON: {exc}") from exc


_INPUT_PATHS = {
    "tuple_path": "tuple",
    "body_path": "body",
    "range_of_path": "range_of",
    "x_path": "x",
    "y_path": "y",
    "points_path": "points",
    "candidates_path": "candidates",
    "diag_path": "diag",
    "perturbed_path": "perturbed",
    "samples_path": "samples",
}

_OPTION_KEYS = ("tol", "seed", "max_iter", "level", "grid", "svg", "json", "strict")


def _job_from_args(args: argparse.Namespace) -> JobSpec:
    inputs = {}
    for attr, key in _INPUT_PATHS.items():
        path = getattr(args, attr, None)
        if path is not None:
            inputs[key] = _load_json(path)
    if getattr(args, "kind", None) is not None:
        inputs["kind"] = args.kind
    options = {k: getattr(args, k, None) for k in _OPTION_KEYS}
    return JobSpec(command=args.command, inputs=inputs, options=options)


def _run_batch(args: argparse.Namespace) -> tuple[dict, int]:
    docs = _load_json(args.jobs_path)
    if not isinstance(docs, list) or not docs:
        raise SchemaError("batch file must be a nonempty JSON list of jobs")
    jobs = []
    for i, doc in enumerate(docs):
        if not isinstance(doc, dict) or "command" not in doc:
            raise SchemaError(f"batch entry {i} lacks a command")
        options = {k: doc.get("options", {}).get(k) for k in _OPTION_KEYS}
        if options.get("strict") is None:
            options["strict"] = args.strict
        jobs.append(
            JobSpec(doc["command"], dict(doc.get("inputs", {})), options)
        )

    def guarded(job: JobSpec) -> tuple[dict, int]:
        try:
            return execute(job)
        except UsageError as exc:
            return {"command": job.command, "status": "UsageError", "error": str(exc)}, EX_USAGE
        except (SchemaError, MConvexError, ValueError) as exc:
            return {
                "command": job.command,
                "status": "DataError",
                "error": f"{type(exc).__name__}: {exc}",
            }, EX_DATAERR

    cap = os.environ.get("MCONVEX_THREADS")
    workers = max(1, int(cap)) if cap else min(4, os.cpu_count() or 1)
    if workers == 1 or len(jobs) == 1:
        outcomes = [guarded(j) for j in jobs]
    else:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(guarded, jobs))
    report = {
        "command": "batch",
        "status": "ok" if all(c == EX_OK for _, c in outcomes) else "Error",
        "jobs": [r for r, _ in outcomes],
        "wall_time_s": 0.0,
    }
    return report, max((c for _, c in outcomes), default=EX_OK)


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EX_USAGE
    try:
        if args.command == "batch":
            report, code = _run_batch(args)
        else:
            report, code = execute(_job_from_args(args))
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EX_USAGE
    except (SchemaError, MConvexError, ValueError) as exc:
        print(
            json.dumps(
                {"status": "DataError", "error": f"{type(exc).__name__}: {exc}"},
                indent=2,
            )
        )
        return EX_DATAERR
    dump_report(report, sys.stdout)
    json_path = getattr(args, "json", None)
    if json_path:
        with open(json_path, "w", encoding="utf-8") as fp:
            dump_report(report, fp)
    return code


if __name__ == "__main__":
    sys.exit(main())
