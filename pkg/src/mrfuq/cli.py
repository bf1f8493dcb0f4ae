"""Command-line front end.

Thin client over the service layer: subcommands build the same request
models the HTTP endpoints accept, execute them in process (or POST them
to a running service with --server), and write CSV/JSON outputs plus a
run manifest.  CSV is the canonical output; --svg adds a rendering with
no numeric logic of its own.

Exit codes: 0 success, 2 input/parse error, 3 capacity, 4 precondition
(including unsupported structural changes), 5 internal error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Sequence

from . import __version__
from .errors import CapacityError, InputError, MrfuqError, PreconditionError
from .manifest import RunManifest
from .service import handlers
from .service import schemas as sc

EXIT_INPUT, EXIT_CAPACITY, EXIT_PRECONDITION, EXIT_INTERNAL = 2, 3, 4, 5
ENUM_CAP_ENV = "MRFUQ_ENUM_CAP"


def _env_cap() -> int | None:
    raw = os.environ.get(ENUM_CAP_ENV)
    if raw is None:
        return None
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"{ENUM_CAP_ENV}={raw!r} is not an integer") from None


def parse_grid(spec: str) -> list[float]:
    """start:stop:step with inclusive endpoints, or a single value."""
    parts = spec.split(":")
    if len(parts) == 1:
        return [float(parts[0])]
    if len(parts) != 3:
        raise InputError(f"grid {spec!r} must be START:STOP:STEP")
    start, stop, step = (float(p) for p in parts)
    if step <= 0 or stop < start:
        raise InputError(f"grid {spec!r} must have positive step and stop >= start")
    values = []
    k = 0
    while True:
        v = start + k * step
        if v > stop + 1e-9 * max(1.0, abs(stop)):
            break
        values.append(round(v, 12))
        k += 1
    return values


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, float):
        return repr(x)
    return str(x)


def write_csv(path: str, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _post(server: str, path: str, payload: dict, response_model):
    import httpx

    resp = httpx.post(server.rstrip("/") + path, json=payload, timeout=600.0)
    if resp.status_code == 400:
        raise InputError(resp.json().get("detail", "input error"))
    if resp.status_code == 413:
        raise CapacityError(0, 0)
    if resp.status_code == 422:
        raise PreconditionError(resp.json().get("detail", "precondition failed"))
    resp.raise_for_status()
    return response_model.model_validate(resp.json())


def _run(server: str | None, path: str, req, response_model, local):
    if server:
        return _post(server, path, req.model_dump(), response_model)
    return local(req)


def _maybe_svg(args, out_base: str, series: dict, title: str, manifest: RunManifest):
    if not getattr(args, "svg", False):
        return
    from .svg import line_chart

    path = out_base + ".svg"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(line_chart(series, title))
    manifest.add_output(path)


# -- subcommands -------------------------------------------------------------

def cmd_bound(args, manifest: RunManifest) -> None:
    with open(args.model, "r", encoding="utf-8") as fh:
        base_text = fh.read()
    manifest.add_input(args.model)
    alt_text = None
    if args.alt_model:
        with open(args.alt_model, "r", encoding="utf-8") as fh:
            alt_text = fh.read()
        manifest.add_input(args.alt_model)
    if (alt_text is None) == (args.eta is None):
        raise InputError("provide exactly one of --alt-model or --eta")
    req = sc.BoundRequest(
        base_model_text=base_text,
        alt_model_text=alt_text,
        eta=args.eta,
        qoi=args.qoi,
        enum_cap=args.enum_cap if args.enum_cap is not None else _env_cap(),
    )
    resp = _run(args.server, "/bound", req, sc.BoundResponse, handlers.handle_bound)
    if resp.ptype == "III":
        raise PreconditionError("Type III perturbation: bounds are not defined")
    out = os.path.join(args.out_dir, "bound.json")
    with open(out, "w", encoding="utf-8") as fh:
        json.dump(resp.model_dump(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    manifest.add_output(out)
    print(
        f"E_base[f] = {resp.base_expectation:.6g}; KL budget = {resp.kl:.6g}; "
        f"bounds = [{resp.lower.value:.6g}, {resp.upper.value:.6g}]"
    )


def cmd_medical(args, manifest: RunManifest) -> None:
    if args.pii_range is not None:
        sweep, values, family = "p_ii", parse_grid(args.pii_range), "type2"
    else:
        spec = args.a_range if args.a_range is not None else "-1:1:0.1"
        sweep, values, family = "a", parse_grid(spec), args.family
    req = sc.MedicalRequest(
        family=family, p_i=args.p_i, p_a=args.p_a, w_c=args.w_c,
        sweep=sweep, values=values, a=args.a, p_ii=args.p_ii,
    )
    resp = _run(args.server, "/medical", req, sc.MedicalResponse, handlers.handle_medical)
    name = f"medical_{family}_{sweep}"
    out = os.path.join(args.out_dir, name + ".csv")
    rows = [(r.parameter, r.lower, r.upper, r.baseline) for r in resp.rows]
    write_csv(out, ("parameter", "lower", "upper", "baseline"), rows)
    manifest.add_output(out)
    xs = [r.parameter for r in resp.rows]
    _maybe_svg(
        args, os.path.join(args.out_dir, name),
        {
            "upper": (xs, [r.upper for r in resp.rows]),
            "lower": (xs, [r.lower for r in resp.rows]),
            "baseline": (xs, [r.baseline for r in resp.rows]),
        },
        f"{family} bounds vs {sweep}", manifest,
    )
    print(f"wrote {out} ({len(rows)} rows)")


def _perturbation_spec(args) -> sc.PerturbationSpec:
    if args.truncation:
        return sc.PerturbationSpec(
            kind="truncation", epsilon=args.eps, j_inf=args.j_inf, gamma=args.gamma
        )
    if args.longrange:
        return sc.PerturbationSpec(kind="longrange", a=args.a, gamma=args.gamma)
    return sc.PerturbationSpec(kind="kac", a=args.a, gamma=args.gamma)


def cmd_ising_band(args, manifest: RunManifest) -> None:
    req = sc.IsingBandRequest(
        beta=args.beta, j_total=args.j_total, h_values=parse_grid(args.h),
        perturbation=_perturbation_spec(args),
        h_tilde_offset=args.h_tilde_offset, method=args.method,
    )
    if args.method == "theorem" and args.beta * args.h_tilde_offset >= 1.0:
        raise PreconditionError(
            "theorem method requires beta * (h~ - h) < 1; use --method norm1"
        )
    resp = _run(args.server, "/ising/band", req, sc.IsingBandResponse, handlers.handle_ising_band)
    out = os.path.join(args.out_dir, "ising_band.csv")
    rows = [
        (r.h, r.m_baseline_minus, r.m_baseline_plus, r.lower, r.upper,
         resp.method, r.lambda_star_lower, r.lambda_star_upper)
        for r in resp.rows
    ]
    write_csv(
        out,
        ("h", "m_baseline_minus", "m_baseline_plus", "lower", "upper",
         "method", "lambda_star_lower", "lambda_star_upper"),
        rows,
    )
    manifest.add_output(out)
    xs = [r.h for r in resp.rows]
    _maybe_svg(
        args, os.path.join(args.out_dir, "ising_band"),
        {
            "upper": (xs, [r.upper for r in resp.rows]),
            "lower": (xs, [r.lower for r in resp.rows]),
            "baseline+": (xs, [r.m_baseline_plus for r in resp.rows]),
            "baseline-": (xs, [r.m_baseline_minus for r in resp.rows]),
        },
        f"magnetization band ({resp.method})", manifest,
    )
    tail = "" if resp.exact_tail is None else f"; exact tail {resp.exact_tail:.4g}"
    print(f"wrote {out} ({len(rows)} rows); budget {resp.budget:.4g}{tail}")


def cmd_ising_finite(args, manifest: RunManifest) -> None:
    req = sc.IsingFiniteRequest(
        dimension=args.d, side=args.L, kernel=args.kernel, gamma=args.gamma,
        beta=args.beta, h=args.h_field, boundary=args.boundary,
        perturbation=_perturbation_spec(args), h_tilde_offset=args.h_tilde_offset,
        method=args.method, mc=args.mc, seed=args.seed,
        enum_cap=args.enum_cap if args.enum_cap is not None else _env_cap(),
    )
    resp = _run(
        args.server, "/ising/finite", req, sc.IsingFiniteResponse,
        handlers.handle_ising_finite,
    )
    out = os.path.join(args.out_dir, "ising_finite.json")
    with open(out, "w", encoding="utf-8") as fh:
        json.dump(resp.model_dump(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    manifest.add_output(out)
    check = "" if resp.bracketed is None else f"; bracketed={resp.bracketed}"
    print(
        f"band [{resp.lower:.6g}, {resp.upper:.6g}] around "
        f"E[m]={resp.baseline_magnetization:.6g}{check}"
    )
    if resp.bracketed is False:
        raise PreconditionError("finite-size band failed to bracket the enumeration")


def cmd_ising_coarse(args, manifest: RunManifest) -> None:
    req = sc.IsingCoarseRequest(
        gammas=[float(g) for g in args.gammas], box_side=args.L,
        h=args.h_field, n_samples=args.samples, seed=args.seed,
    )
    resp = _run(
        args.server, "/ising/coarse", req, sc.IsingCoarseResponse,
        handlers.handle_ising_coarse,
    )
    out = os.path.join(args.out_dir, "ising_coarse.csv")
    rows = [
        (r.gamma, r.block_side, r.box_side, r.delta1, r.max_cross_block_gap,
         r.delta1_holds, r.delta2, r.max_same_block_gap, r.delta2_holds,
         r.max_energy_ratio)
        for r in resp.rows
    ]
    write_csv(
        out,
        ("gamma", "block_side", "box_side", "delta1", "max_cross_block_gap",
         "delta1_holds", "delta2", "max_same_block_gap", "delta2_holds",
         "max_energy_ratio"),
        rows,
    )
    manifest.add_output(out)
    ok = all(r.delta1_holds and r.delta2_holds for r in resp.rows)
    print(f"wrote {out}; block-average estimates hold: {ok}")


def cmd_ising_longrange(args, manifest: RunManifest) -> None:
    req = sc.IsingLongRangeRequest(
        a=args.a, gamma=args.gamma, side=args.L, beta=args.beta,
        h=args.h_field, boundary=args.boundary, n_samples=args.samples,
        seed=args.seed,
        enum_cap=args.enum_cap if args.enum_cap is not None else _env_cap(),
    )
    resp = _run(
        args.server, "/ising/longrange", req, sc.IsingLongRangeResponse,
        handlers.handle_ising_longrange,
    )
    out = os.path.join(args.out_dir, "ising_longrange.json")
    with open(out, "w", encoding="utf-8") as fh:
        json.dump(resp.model_dump(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    manifest.add_output(out)
    print(
        f"tail sum {resp.tail_sum:.10g}; kappa bound {resp.kappa_bound:.6g} "
        f"dominates sampled max {resp.max_sampled_kappa:.6g}: {resp.dominated}"
    )


def cmd_serve(args, manifest: RunManifest) -> None:
    import uvicorn

    from .service.app import app

    uvicorn.run(app, host=args.host, port=args.port)


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="mrfuq",
        description="Uncertainty bounds for discrete Markov random fields",
    )
    p.add_argument("--version", action="version", version=f"mrfuq {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--out-dir", default=".", help="output directory")
        sp.add_argument("--server", default=None, help="base URL of a running service")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--enum-cap", type=int, default=None,
                        help=f"enumeration cap (or set {ENUM_CAP_ENV})")
        sp.add_argument("--svg", action="store_true", help="also render an SVG chart")

    b = sub.add_parser("bound", help="bounds for a model pair or an eta ball")
    common(b)
    b.add_argument("--model", required=True, help="baseline model file")
    b.add_argument("--alt-model", default=None, help="alternative model file")
    b.add_argument("--eta", type=float, default=None, help="KL radius instead of a model")
    b.add_argument("--qoi", required=True, help="'indicator:NODE=VAL,...' or 'mean:NODE'")
    b.set_defaults(func=cmd_bound)

    m = sub.add_parser("medical", help="diagnostic-network bound curves")
    common(m)
    m.add_argument("--family", choices=("type1", "type2"), default="type1")
    m.add_argument("--p-i", dest="p_i", type=float, default=0.2)
    m.add_argument("--p-a", dest="p_a", type=float, default=0.3)
    m.add_argument("--w-c", dest="w_c", type=float, default=1.5)
    m.add_argument("--a-range", default=None, help="sweep of the weight change a")
    m.add_argument("--pii-range", default=None, help="sweep of p_ii (type2)")
    m.add_argument("--a", type=float, default=0.0, help="fixed a for the p_ii sweep")
    m.add_argument("--p-ii", dest="p_ii", type=float, default=0.3,
                   help="fixed p_ii for the type2 a sweep")
    m.set_defaults(func=cmd_medical)

    i = sub.add_parser("ising", help="lattice spin-system commands")
    isub = i.add_subparsers(dest="ising_command", required=True)

    def ising_common(sp):
        common(sp)
        sp.add_argument("--beta", type=float, default=1.1)
        sp.add_argument("--gamma", type=float, default=0.25)
        sp.add_argument("--a", type=float, default=0.1)
        sp.add_argument("--truncation", action="store_true")
        sp.add_argument("--eps", type=float, default=0.05)
        sp.add_argument("--j-inf", dest="j_inf", type=float, default=1.0)
        sp.add_argument("--longrange", action="store_true")
        sp.add_argument("--h-tilde-offset", type=float, default=0.0)
        sp.add_argument("--method", choices=("theorem", "norm1"), default="theorem")

    band = isub.add_parser("band", help="mean-field phase-diagram band")
    ising_common(band)
    band.add_argument("--J", dest="j_total", type=float, default=1.0)
    band.add_argument("--h", default="-2:2:0.02", help="field grid START:STOP:STEP")
    band.set_defaults(func=cmd_ising_band)

    fin = isub.add_parser("finite", help="finite-box band with enumeration check")
    ising_common(fin)
    fin.add_argument("--d", type=int, default=1)
    fin.add_argument("--L", type=int, default=12)
    fin.add_argument("--kernel", choices=("kac", "pwc", "nn"), default="kac")
    fin.add_argument("--h-field", type=float, default=0.0)
    fin.add_argument("--boundary", choices=("free", "plus", "minus"), default="free")
    fin.add_argument("--mc", action="store_true", help="allow Monte Carlo fallback")
    fin.set_defaults(func=cmd_ising_finite)

    co = isub.add_parser("coarse", help="block coarse-graining checks")
    common(co)
    co.add_argument("--gammas", nargs="+", default=["0.25", "0.0625"])
    co.add_argument("--L", type=int, default=None)
    co.add_argument("--h-field", type=float, default=0.0)
    co.add_argument("--samples", type=int, default=8)
    co.set_defaults(func=cmd_ising_coarse)

    lr = isub.add_parser("longrange", help="1/r^2 tail constants and band")
    common(lr)
    lr.add_argument("--a", type=float, default=1.0)
    lr.add_argument("--gamma", type=float, default=0.125)
    lr.add_argument("--L", type=int, default=12)
    lr.add_argument("--beta", type=float, default=1.0)
    lr.add_argument("--h-field", type=float, default=0.0)
    lr.add_argument("--boundary", choices=("free", "plus", "minus"), default="plus")
    lr.add_argument("--samples", type=int, default=64)
    lr.set_defaults(func=cmd_ising_longrange)

    s = sub.add_parser("serve", help="run the HTTP service")
    s.add_argument("--host", default="127.0.0.1")
    s.add_argument("--port", type=int, default=8000)
    s.set_defaults(func=cmd_serve, out_dir=".", server=None, seed=0)

    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    manifest = RunManifest(
        command=["mrfuq"] + list(argv if argv is not None else sys.argv[1:]),
        version=__version__,
        seed=getattr(args, "seed", None),
    )
    try:
        out_dir = getattr(args, "out_dir", ".")
        os.makedirs(out_dir, exist_ok=True)
        args.func(args, manifest)
        if args.command != "serve":
            manifest.write(os.path.join(out_dir, f"{args.command}_manifest.json"))
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except PreconditionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except MrfuqError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    return 0


if __name__ == "__main__":
    sys.exit(main())
