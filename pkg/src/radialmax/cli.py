"""Command-line front end.

Exit codes: 0 on success, 1 on a computational or I/O failure (a JSON error
report goes to stderr), 2 on usage errors and on parameters the library rejects.  Relative ``--out``
paths resolve against ``$RADIALMAX_OUT_DIR`` when it is set.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from ._validation import ParameterError, RadialMaxError, parse_rational
from .dilation_sets import GENERATORS, MAX_DEPTH, SetSpec, WindowSpec, generate
from .experiments import (
    claim_annulus,
    experiment_knapp,
    experiment_pq,
    experiment_stein_log,
    region_scan,
)
from .io import dumps_csv, dumps_json, load_set, region_document, set_document, write_text
from .maximal_ops import domination_check, maximal_value
from .radial_averages import RadialFunction, sphere_average, sphere_average_mc
from .spectra import (
    assouad_spectrum_estimate,
    covering_profile,
    minkowski_estimate,
    nu_sharp_estimate,
    nu_sharp_upper_bound,
    profile_rows,
    quasi_assouad_estimate,
)
from .type_sets import (
    ExponentPair,
    TypeRegion,
    ClosedFormNuSharp,
    closure_boundary,
    endpoint_classify,
    quadrangle_vertices_general,
    quadrangle_vertices_radial,
    region_membership,
    triangle_vertices,
)

OUT_DIR_ENV = "RADIALMAX_OUT_DIR"


class UsageError(Exception):
    """Bad command line; maps to exit code 2."""


@dataclass
class RunPlan:
    """A validated command: id, resolved parameters, output path and root seed."""

    command: str
    params: dict = field(default_factory=dict)
    out: Path = None
    fmt: str = "json"
    seed: int = 0
    threads: int = 1


# argument parsing -------------------------------------------------------------------
class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _common(p, set_spec=False, out=True):
    if set_spec:
        p.add_argument("--set-spec", required=True, metavar="FILE", help="set spec or set artifact (JSON)")
        p.add_argument("--depth", type=int, help="override the spec's depth")
    if out:
        p.add_argument("--out", metavar="FILE", help="output file (stdout when omitted)")
        p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1, help="worker cap; results do not depend on it")


def build_parser():
    root = _Parser(prog="radialmax", description="Radial spherical maximal functions over fractal dilation sets.")
    root.add_argument("--version", action="version", version=f"radialmax {__version__}")
    sub = root.add_subparsers(dest="group", required=True, parser_class=_Parser)

    s = sub.add_parser("set").add_subparsers(dest="action", required=True, parser_class=_Parser)
    mk = s.add_parser("make", help="generate a dilation set")
    mk.add_argument("--generator", required=True, choices=GENERATORS)
    mk.add_argument("--depth", type=int, required=True)
    mk.add_argument("--base", type=int)
    mk.add_argument("--digits")
    mk.add_argument("--beta")
    mk.add_argument("--gamma")
    mk.add_argument("--growth")
    mk.add_argument("--points")
    mk.add_argument("--include-cells", action="store_true")
    _common(mk)

    d = sub.add_parser("dim").add_subparsers(dest="action", required=True, parser_class=_Parser)
    est = d.add_parser("estimate", help="Minkowski and quasi-Assouad estimates")
    est.add_argument("--window")
    _common(est, set_spec=True)

    ns = sub.add_parser("nusharp", help="nu_sharp estimates")
    ns.add_argument("--alpha", required=True, help="comma-separated exponents")
    ns.add_argument("--window")
    _common(ns, set_spec=True)

    sp = sub.add_parser("spectrum", help="Assouad spectrum and window covering counts")
    sp.add_argument("--thetas", default="0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9")
    sp.add_argument("--window")
    _common(sp, set_spec=True)

    rg = sub.add_parser("region").add_subparsers(dest="action", required=True, parser_class=_Parser)
    rv = rg.add_parser("vertices")
    rv.add_argument("--d", type=int, required=True)
    rv.add_argument("--beta", required=True)
    rv.add_argument("--gamma")
    kind = rv.add_mutually_exclusive_group()
    kind.add_argument("--radial", action="store_true", help="the d = 2 radial quadrangle")
    kind.add_argument("--general", action="store_true", help="the non-radial quadrangle")
    _common(rv)
    for name in ("membership", "boundary"):
        r = rg.add_parser(name)
        r.add_argument("--d", type=int, required=True)
        r.add_argument("--beta", required=True)
        r.add_argument("--gamma", help="d = 2: use the closed-form nu_sharp of (beta, gamma)")
        if name == "membership":
            r.add_argument("--p", required=True)
            r.add_argument("--q", required=True)
        else:
            r.add_argument("--resolution", type=int, default=64)
        _common(r)
    rc = rg.add_parser("classify")
    rc.add_argument("--d", type=int, required=True)
    rc.add_argument("--p", required=True)
    rc.add_argument("--q", required=True)
    _common(rc, set_spec=True)

    av = sub.add_parser("avg", help="one spherical average")
    _function_args(av)
    av.add_argument("--d", type=int, required=True)
    av.add_argument("--r", required=True)
    av.add_argument("--t", required=True)
    av.add_argument("--tol", default="1e-9")
    av.add_argument("--mc-samples", type=int, default=0, help="also run the Monte Carlo oracle")
    _common(av)

    mx = sub.add_parser("maximal", help="M_E f at given radii")
    _function_args(mx)
    mx.add_argument("--d", type=int, required=True)
    mx.add_argument("--r", required=True, help="comma-separated radii")
    mx.add_argument("--p", help="also evaluate the decomposition pieces and the domination ratio")
    mx.add_argument("--tol", default="1e-9")
    _common(mx, set_spec=True)

    ex = sub.add_parser("experiment").add_subparsers(dest="action", required=True, parser_class=_Parser)
    pq = ex.add_parser("pq")
    pq.add_argument("--d", type=int, required=True)
    pq.add_argument("--p", required=True)
    pq.add_argument("--q", required=True)
    pq.add_argument("--kmin", type=int, default=6)
    pq.add_argument("--kmax", type=int, default=13)
    _common(pq, set_spec=True)
    kn = ex.add_parser("knapp")
    kn.add_argument("--d", type=int, required=True)
    kn.add_argument("--p", required=True)
    kn.add_argument("--q", required=True)
    kn.add_argument("--window", default="0,0", help="dyadic window as level,position")
    kn.add_argument("--mmin", type=int, default=4)
    kn.add_argument("--mmax", type=int, default=10)
    _common(kn, set_spec=True)
    an = ex.add_parser("annulus")
    an.add_argument("--d", type=int, required=True)
    an.add_argument("--mmin", type=int, default=4)
    an.add_argument("--mmax", type=int, default=10)
    an.add_argument("--t", default="1.5")
    an.add_argument("--t-left", default="1")
    an.add_argument("--c1", default="-0.1,0,0.1")
    _common(an)
    st = ex.add_parser("stein")
    st.add_argument("--d", type=int, required=True)
    st.add_argument("--q", required=True)
    st.add_argument("--mmin", type=int, default=6)
    st.add_argument("--mmax", type=int, default=16)
    st.add_argument("--allow-full", action="store_true", help="skip the null-closure guard (trend only)")
    _common(st, set_spec=True)
    sc = ex.add_parser("scan")
    sc.add_argument("--d", type=int, required=True)
    sc.add_argument("--resolution", type=int, default=32)
    sc.add_argument("--scales", help="mmin,mmax")
    _common(sc, set_spec=True)
    return root


def _function_args(p):
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--function", metavar="FILE", help='radial function JSON {"kind", "params"}')
    g.add_argument("--indicator", metavar="A,B", help="indicator of [A, B]")
    g.add_argument("--bump", metavar="C,W", help="smooth bump centred at C with half-width W")


# value conversion ---------------------------------------------------------------
def _flag_error(flag, exc):
    return UsageError(f"{flag}: {exc}")


def _real(text, flag):
    try:
        v = parse_rational(text)
    except ParameterError as exc:
        raise _flag_error(flag, exc) from None
    return v


def _float(text, flag):
    return float(_real(text, flag))


def _exponent(text, flag):
    """An exponent in ``[1, inf]``; ``inf`` is accepted."""
    if str(text).strip().lower() in ("inf", "infinity"):
        return math.inf
    v = _real(text, flag)
    if v < 1:
        raise _flag_error(flag, f"exponent {text} must be >= 1")
    return v


def _list(text, flag, conv=float):
    try:
        return [conv(x) for x in str(text).split(",") if x.strip()]
    except ValueError as exc:
        raise _flag_error(flag, exc) from None


def _pair(text, flag, conv=int):
    vals = _list(text, flag, conv)
    if len(vals) != 2:
        raise _flag_error(flag, "expected two comma-separated values")
    return tuple(vals)


def _resolve_out(out):
    if out is None:
        return None
    path = Path(out)
    base = os.environ.get(OUT_DIR_ENV)
    if not path.is_absolute() and base:
        path = Path(base) / path
    return path.resolve()


def _function(ns):
    if ns.function:
        try:
            return RadialFunction.from_dict(json.loads(Path(ns.function).read_text()))
        except OSError as exc:
            raise UsageError(f"--function: cannot read {ns.function}: {exc.strerror}") from None
        except (ValueError, ParameterError) as exc:
            raise _flag_error("--function", exc) from None
    try:
        if ns.indicator:
            return RadialFunction.indicator(*_pair(ns.indicator, "--indicator", float))
        return RadialFunction.smooth_bump(*_pair(ns.bump, "--bump", float))
    except ParameterError as exc:
        raise _flag_error("--indicator" if ns.indicator else "--bump", exc) from None


def _set_params(ns):
    params = {}
    if ns.base is not None:
        params["base"] = ns.base
    if ns.digits is not None:
        params["digits"] = _list(ns.digits, "--digits", int)
    for name in ("beta", "gamma", "growth"):
        val = getattr(ns, name)
        if val is not None:
            params[name] = _real(val, f"--{name}")
    if ns.points is not None:
        params["points"] = _list(ns.points, "--points", float)
    return params


def parse(argv):
    """Turn ``argv`` into a validated :class:`RunPlan`; raises :class:`UsageError`."""
    ns = build_parser().parse_args(argv)
    command = ns.group if getattr(ns, "action", None) is None else f"{ns.group} {ns.action}"
    if ns.threads < 1:
        raise UsageError("--threads: must be at least 1")
    params = {}
    if hasattr(ns, "set_spec"):
        if ns.depth is not None and ns.depth < 1:
            raise UsageError("--depth: must be at least 1")
        params["set_spec"] = str(Path(ns.set_spec).resolve())
        params["depth"] = ns.depth
    if hasattr(ns, "d") and ns.d is not None and ns.d < 2:
        raise UsageError("--d: dimension must be at least 2")
    if command == "set make":
        if not 1 <= ns.depth <= MAX_DEPTH:
            raise UsageError(f"--depth: must lie in [1, {MAX_DEPTH}]")
        params.update(generator=ns.generator, depth=ns.depth, params=_set_params(ns), include_cells=ns.include_cells)
        try:
            # cheap parameter check at a shallow depth
            generate(SetSpec(ns.generator, params["params"]), min(ns.depth, 6))
        except (ParameterError, TypeError) as exc:
            raise UsageError(f"set make: {exc}") from None
    elif command in ("dim estimate", "nusharp", "spectrum"):
        params["window"] = None if ns.window is None else _pair(ns.window, "--window")
        if command == "nusharp":
            params["alpha"] = _list(ns.alpha, "--alpha")
        if command == "spectrum":
            params["thetas"] = _list(ns.thetas, "--thetas")
    elif command.startswith("region"):
        params["d"] = ns.d
        if command != "region classify":
            params["beta"] = _real(ns.beta, "--beta")
            params["gamma"] = None if ns.gamma is None else _real(ns.gamma, "--gamma")
        if command == "region vertices":
            params["kind"] = "radial" if ns.radial else ("general" if ns.general else "triangle")
            if params["kind"] != "triangle" and params["gamma"] is None:
                raise UsageError("--gamma: required for quadrangle vertices")
        if command in ("region membership", "region classify"):
            params["p"] = _exponent(ns.p, "--p")
            params["q"] = _exponent(ns.q, "--q")
        if command == "region boundary":
            if ns.resolution < 8:
                raise UsageError("--resolution: must be at least 8")
            params["resolution"] = ns.resolution
    elif command in ("avg", "maximal"):
        params["function"] = _function(ns)
        params["d"] = ns.d
        params["tol"] = _float(ns.tol, "--tol")
        if params["tol"] <= 0:
            raise UsageError("--tol: must be positive")
        if command == "avg":
            params["r"] = _float(ns.r, "--r")
            params["t"] = _float(ns.t, "--t")
            if params["r"] < 0 or params["t"] <= 0:
                raise UsageError("--r/--t: need r >= 0 and t > 0")
            if ns.mc_samples and ns.mc_samples < 1000:
                raise UsageError("--mc-samples: need at least 1000")
            params["mc_samples"] = ns.mc_samples
        else:
            params["r"] = _list(ns.r, "--r")
            if any(r <= 0 for r in params["r"]):
                raise UsageError("--r: radii must be positive")
            params["p"] = None if ns.p is None else float(_exponent(ns.p, "--p"))
            if params["p"] is not None and not 1 < params["p"] < math.inf:
                raise UsageError("--p: need 1 < p < inf")
    elif command.startswith("experiment"):
        params["d"] = ns.d
        if command in ("experiment pq", "experiment knapp"):
            params["p"] = float(_exponent(ns.p, "--p"))
            params["q"] = float(_exponent(ns.q, "--q"))
            if params["p"] > params["q"]:
                raise UsageError("--p/--q: need p <= q")
        if command == "experiment pq":
            params["k_range"] = (ns.kmin, ns.kmax)
            if not 6 <= ns.kmin < ns.kmax <= 16:
                raise UsageError("--kmin/--kmax: need 6 <= kmin < kmax <= 16")
        if command == "experiment knapp":
            params["window"] = _pair(ns.window, "--window")
            params["delta_range"] = (ns.mmin, ns.mmax)
        if command == "experiment annulus":
            params["delta_range"] = (ns.mmin, ns.mmax)
            params["t"] = _float(ns.t, "--t")
            params["t_left"] = _float(ns.t_left, "--t-left")
            params["c1"] = _list(ns.c1, "--c1")
            if any(abs(c) > 0.1 for c in params["c1"]):
                raise UsageError("--c1: |c1| must not exceed 1/10")
        if command == "experiment stein":
            params["q"] = float(_exponent(ns.q, "--q"))
            params["delta_range"] = (ns.mmin, ns.mmax)
            params["allow_full"] = ns.allow_full
        if command == "experiment scan":
            if not 2 <= ns.resolution <= 64:
                raise UsageError("--resolution: must lie in [2, 64]")
            params["resolution"] = ns.resolution
            params["scales"] = None if ns.scales is None else _pair(ns.scales, "--scales")
    out = _resolve_out(getattr(ns, "out", None))
    return RunPlan(command, params, out, getattr(ns, "format", "json"), ns.seed, ns.threads)


# execution ------------------------------------------------------------------------
def _region(params):
    d, beta, gamma = params["d"], params["beta"], params["gamma"]
    if d == 2 and gamma is not None:
        return TypeRegion(2, beta, ClosedFormNuSharp(beta, gamma), "closure_d2")
    return TypeRegion(d, beta)


def _pair_from_pq(p, q):
    return ExponentPair.from_pq(p, q)


def _load(params):
    _, E = load_set(params["set_spec"], params.get("depth"))
    return E


def _run(plan):
    """Return ``(kind, payload, csv_rows)`` for the plan's command."""
    c, pr = plan.command, plan.params
    if c == "set make":
        spec = SetSpec(pr["generator"], pr["params"], pr["depth"])
        E = generate(spec)
        return "set", set_document(spec, E, pr["include_cells"]), [
            {"cell": int(j), "left": 1.0 + int(j) * E.cell_length} for j in E.cells
        ]
    if c == "dim estimate":
        E = _load(pr)
        P = covering_profile(E)
        fit = minkowski_estimate(P, pr["window"])
        thetas = [i / 10 for i in range(1, 10)]
        payload = {
            "depth": E.depth,
            "minkowski": fit.to_dict(),
            "quasi_assouad": quasi_assouad_estimate(P, thetas, pr["window"]),
            "profile": None if E.profile is None else E.profile.to_dict(),
        }
        rows = [{"m": m, "N": int(P.global_counts[m])} for m in range(P.depth + 1)]
        return "dimensions", payload, rows
    if c == "nusharp":
        E = _load(pr)
        P = covering_profile(E)
        prof = E.profile
        rows = []
        for a in pr["alpha"]:
            row = {"alpha": a, "estimate": nu_sharp_estimate(P, a, pr["window"]).slope}
            if prof is not None:
                row["upper_bound"] = nu_sharp_upper_bound(a, float(prof.beta), float(prof.gamma)) if a >= 0 else float(prof.beta)
            rows.append(row)
        return "nusharp", {"depth": E.depth, "rows": rows}, rows
    if c == "spectrum":
        E = _load(pr)
        P = covering_profile(E)
        spec = assouad_spectrum_estimate(P, pr["thetas"], pr["window"])
        payload = {"depth": E.depth, "assouad_spectrum": [{"theta": t, "value": v} for t, v in spec.items()]}
        rows = [{"k": k, "m": m, "count": n} for k, m, n in profile_rows(P)]
        return "spectrum", payload, rows
    if c == "region vertices":
        if pr["kind"] == "radial":
            verts = quadrangle_vertices_radial(pr["beta"], pr["gamma"])
            names = ["P1", "P2", "P4rad", "P5rad"]
            R = TypeRegion(2, pr["beta"], ClosedFormNuSharp(pr["beta"], pr["gamma"]), "closure_d2")
        elif pr["kind"] == "general":
            verts = quadrangle_vertices_general(pr["d"], pr["beta"], pr["gamma"])
            names = ["P1", "P2", "P3", "P4"]
            R = TypeRegion(pr["d"], pr["beta"])
        else:
            verts = triangle_vertices(pr["d"], pr["beta"])
            names = ["P1", "P2", "P3rad"]
            R = TypeRegion(pr["d"], pr["beta"])
        doc = region_document(R, verts)
        doc["names"] = names
        rows = [{"name": n, "inv_p": v.inv_p, "inv_q": v.inv_q} for n, v in zip(names, verts)]
        return "region-vertices", doc, rows
    if c == "region membership":
        R = _region(pr)
        pt = _pair_from_pq(pr["p"], pr["q"])
        status = region_membership(R, pt)
        payload = {"inv_p": pt.to_json()[0], "inv_q": pt.to_json()[1], "mode": R.mode, "membership": status}
        return "region-membership", payload, [{"inv_p": pt.inv_p, "inv_q": pt.inv_q, "membership": status}]
    if c == "region boundary":
        R = _region(pr)
        B = closure_boundary(R, pr["resolution"])
        rows = [{"inv_p": p.inv_p, "inv_q": p.inv_q, "active_constraint": a} for p, a in zip(B.points, B.active)]
        doc = region_document(R, B.vertices)
        doc["points"] = [p.to_json() for p in B.points]
        return "region-boundary", doc, rows
    if c == "region classify":
        spec, E = load_set(pr["set_spec"], pr.get("depth"))
        if E.profile is None:
            raise ParameterError("the set has no analytic profile to classify with")
        pt = _pair_from_pq(pr["p"], pr["q"])
        v = endpoint_classify(E.profile, pr["d"], pt)
        payload = {"inv_p": pt.to_json()[0], "inv_q": pt.to_json()[1], "status": v.status, "case": v.case}
        return "region-classify", payload, [{"inv_p": pt.inv_p, "inv_q": pt.inv_q, "status": v.status, "case": v.case}]
    if c == "avg":
        f = pr["function"]
        res = sphere_average(f, pr["d"], pr["r"], pr["t"], pr["tol"])
        payload = res.to_dict()
        payload["function"] = f.to_dict()
        if pr["mc_samples"]:
            mean, se = sphere_average_mc(f, pr["d"], pr["r"], pr["t"], pr["mc_samples"], plan.seed)
            payload["monte_carlo"] = {"mean": mean, "std_error": se, "samples": pr["mc_samples"], "seed": plan.seed}
        return "average", payload, [{"value": res.value, "error": res.abs_error_estimate, "evaluations": res.evaluations}]
    if c == "maximal":
        E = _load(pr)
        if pr["p"] is not None:
            rep = domination_check(E, pr["function"], pr["d"], pr["p"], pr["r"], pr["tol"])
            rows = rep.rows()
            payload = {"rows": rows, "max_ratio": rep.max_ratio, "node_of_max": rep.node_of_max,
                       "skipped": rep.skipped, "function": pr["function"].to_dict()}
            return "domination", payload, rows
        rows = []
        for r in pr["r"]:
            mv = maximal_value(E, pr["function"], pr["d"], r, pr["tol"], report=True)
            rows.append({"r": r, "maximal_value": mv.value, "t_argmax": mv.t_argmax,
                         "refinement_delta": mv.refinement_delta, "samples": mv.n_samples})
        return "maximal", {"rows": rows, "function": pr["function"].to_dict()}, rows
    if c == "experiment pq":
        rec = experiment_pq(_load(pr), pr["d"], pr["p"], pr["q"], pr["k_range"])
        return "experiment", rec.to_dict(), rec.rows()
    if c == "experiment knapp":
        rec = experiment_knapp(_load(pr), pr["d"], pr["p"], pr["q"], WindowSpec(*pr["window"]), pr["delta_range"])
        return "experiment", rec.to_dict(), rec.rows()
    if c == "experiment annulus":
        rep = claim_annulus(pr["d"], pr["delta_range"], pr["t"], pr["t_left"], tuple(pr["c1"]))
        rows = [
            {"delta": dl, "c1": c1, "ratio": v}
            for dl, row in zip(rep.deltas, rep.ratios) for c1, v in zip(pr["c1"], row)
        ]
        return "annulus", rep.to_dict(), rows
    if c == "experiment stein":
        rec = experiment_stein_log(_load(pr), pr["d"], pr["q"], pr["delta_range"],
                                   require_null_closure=not pr["allow_full"])
        return "experiment", rec.to_dict(), rec.rows()
    if c == "experiment scan":
        E = _load(pr)
        scales = None if pr["scales"] is None else list(range(pr["scales"][0], pr["scales"][1] + 1))
        scan = region_scan(E, pr["d"], pr["resolution"], scales)
        cols = ["inv_p", "inv_q", "exponent_easy", "exponent_knapp", "excluded", "predicted_member"]
        rows = [{k: r[k] for k in cols} for r in scan.rows]
        payload = {"d": scan.d, "scales": scan.scales, "consistent": scan.consistent, "rows": scan.rows}
        return "region-scan", payload, rows
    raise UsageError(f"unknown command {c!r}")


def execute(plan, stdout=None):
    """Run a plan and write its artifact; returns the exit code."""
    stdout = sys.stdout if stdout is None else stdout
    np.random.seed(plan.seed % (2**32))
    kind, payload, rows = _run(plan)
    text = dumps_csv(kind, rows) if plan.fmt == "csv" else dumps_json(kind, payload)
    if plan.out is None:
        stdout.write(text)
    else:
        write_text(plan.out, text)
    return 0


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    try:
        plan = parse(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:  # --help and --version
        return int(exc.code or 0)
    try:
        return execute(plan)
    except ParameterError as exc:
        print(f"validation error: {plan.command}: {exc}", file=sys.stderr)
        return 2
    except (RadialMaxError, ArithmeticError, ValueError, OSError) as exc:
        report = {"error": type(exc).__name__, "message": str(exc), "command": plan.command}
        best = getattr(exc, "value", None)
        if isinstance(best, float):
            report["best_estimate"] = best
            report["abs_error"] = getattr(exc, "abs_error", None)
        print(json.dumps(report, sort_keys=True, default=str), file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
