"""Command-line harness: build examples, dump spectral pages, run checks,
and emit deterministic reports (optionally with rendered page charts)."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .chains import homology_dims
from .checks import CHECK_IDS, run_check
from .cosimplicial import total
from .operations import OrbitSquare
from .simplicial import (
    add_basepoint,
    build_preset,
    cofiber,
    kan_suspension,
    normalize,
    simplex,
    skeleton,
)
from .specseq import abutment_filtration, page
from .totalization import tot_ell
from .universal import (
    SpaceFamily,
    build_universal,
    constant_family,
    small_model_bicomplex,
)

DEFAULT_BATTERY = (
    ("fig2-shape", {"s": 1, "t": 2, "P": 6, "Q": 7}),
    ("fig1-shape", {"s": 1, "t": 1, "P": 5, "Q": 6}),
    ("fig1-shape", {"s": 1, "t": 2, "P": 6, "Q": 10, "big_cross": False}),
    ("interchange-iso", {"s": 1, "t": 1, "P": 2, "Q": 5}),
    ("comodule-map", {"family": "universal", "s": 1, "t": 1, "P": 2, "Q": 5}),
    ("comodule-map", {"family": "constant-interval", "P": 2, "Q": 4}),
    ("main-convergence", {"s": 1, "t": 1, "m": 0}),
    ("main-convergence", {"s": 1, "t": 1, "m": 1}),
    ("main-convergence", {"s": 1, "t": 1, "m": 2}),
    ("main-convergence", {"s": 1, "t": 2, "m": 1}),
    ("tensor-products", {"ell": 4}),
    ("bottom-op", {"s": 1, "t": 1}),
    ("external-mult", {"s": 1, "t": 1}),
)


def build_space(desc: dict):
    kind = desc["kind"]
    if kind == "suspension":
        return kan_suspension(build_space(desc["of"]))
    if kind == "cofiber-skeleton":
        p, ell, Q = desc["p"], desc["ell"], desc["Q"]
        x = add_basepoint(simplex(p, Q))
        return cofiber(x, lambda n, lab: lab == x.basepoint(n) or x.core_dim(n, lab) <= ell)
    return build_preset(kind, **{k: v for k, v in desc.items() if k != "kind"})


def build_family(desc: dict) -> SpaceFamily:
    kind = desc.get("type", "universal")
    if kind == "universal":
        return build_universal(desc["s"], desc["t"], desc["P"], desc["Q"])
    if kind == "constant":
        return constant_family(build_space(desc["space"]), desc["P"])
    raise ValueError(f"unknown family type {kind!r}")


def family_from_args(args) -> SpaceFamily:
    if getattr(args, "config", None):
        desc = json.loads(Path(args.config).read_text())
        return build_family(desc["family"]), desc.get("model", "plain")
    return build_universal(args.s, args.t, args.P, args.Q), getattr(args, "model", None) or "plain"


def model_filtered(fam: SpaceFamily, model: str, p_max=None, n_max=None):
    if model in ("plain", "universal"):
        return fam.filtered
    if model == "small-model":
        return total(small_model_bicomplex(fam, p_max=p_max or fam.P, n_max=n_max or fam.Q))
    if model == "orbit-square":
        osq = OrbitSquare(fam, p_max=p_max or fam.P, n_max=n_max or fam.Q)
        return osq.filtered
    raise ValueError(f"unknown model {model!r}")


def page_dump(f, r: int) -> dict:
    region = []
    for s1 in range(0, f.p_top + 1):
        for t1 in range(0, f.source.n_max + 1):
            if t1 - s1 < f.lo:
                continue
            if s1 + r <= f.p_top and t1 + r + 1 <= f.source.n_max:
                region.append((s1, t1))
    entries, _ = page(f, r, region, check_window=False)
    return {
        "r": r,
        "window": f.window.as_dict(),
        "entries": [
            {"s": s1, "t": t1, "dim": entries[(s1, t1)].dim}
            for (s1, t1) in sorted(entries)
        ],
    }


def dump_csv(dump: dict) -> str:
    lines = ["r,s,t,dim"]
    for e in dump["entries"]:
        lines.append(f"{dump['r']},{e['s']},{e['t']},{e['dim']}")
    return "\n".join(lines) + "\n"


def reports_csv(reports) -> str:
    lines = ["check,params,verdict,duration_ms,witnesses"]
    for rep in reports:
        d = rep.to_dict()
        params = ";".join(f"{k}={v}" for k, v in d["params"].items())
        wit = ";".join(w["detail"] for w in d["witnesses"])
        lines.append(f"{d['check']},{params},{d['verdict']},{d['duration_ms']},{wit}")
    return "\n".join(lines) + "\n"


def render_page_figure(dump: dict, path: Path, title: str) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 5))
    xs, ys, dims = [], [], []
    for e in dump["entries"]:
        if e["dim"]:
            xs.append(-e["s"])
            ys.append(e["t"])
            dims.append(e["dim"])
    ax.scatter(xs, ys, s=60, c="black", zorder=3)
    for x, y, d in zip(xs, ys, dims):
        if d > 1:
            ax.annotate(str(d), (x, y), textcoords="offset points", xytext=(5, 5))
    w = dump["window"]
    ax.set_xlim(-w["P"] - 0.5, 0.5)
    ax.set_ylim(-0.5, w["Q"] + 0.5)
    ax.set_xlabel("column (filtration)")
    ax.set_ylabel("chain degree")
    ax.set_title(title)
    ax.grid(True, linewidth=0.3, zorder=0)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def cmd_page(args) -> int:
    fam, model = family_from_args(args)
    f = model_filtered(fam, args.model or model or "plain", args.p_max, args.n_max)
    dump = page_dump(f, args.r)
    text = json.dumps(dump, sort_keys=True, indent=2) if args.format == "json" else dump_csv(dump)
    _emit(text, args.out)
    return 0


def cmd_tot_homology(args) -> int:
    fam, _ = family_from_args(args)
    ell = args.ell if args.ell is not None else fam.P
    q_top = args.q_top if args.q_top is not None else max(1, min(3, fam.Q - fam.P))
    tot = tot_ell(fam.bicomplex, ell, q_top)
    ntot = normalize(tot.module)
    dims = homology_dims(ntot, range(q_top))
    h, filt = abutment_filtration(fam.filtered, args.degree if args.degree is not None else 0)
    out = {
        "ell": ell,
        "levels": [tot.dim(q) for q in range(q_top + 1)],
        "homology": {str(k): v for k, v in sorted(dims.items())},
        "abutment_filtration_dims": [sub.dim for sub in filt],
    }
    text = (
        json.dumps(out, sort_keys=True, indent=2)
        if args.format == "json"
        else "degree,dim\n" + "\n".join(f"{k},{v}" for k, v in sorted(dims.items())) + "\n"
    )
    _emit(text, args.out)
    return 0


def cmd_universal(args) -> int:
    u = build_universal(args.s, args.t, args.P, args.Q)
    out = {
        "s": args.s,
        "t": args.t,
        "window": u.bicomplex.window.as_dict(),
        "cells": {
            f"(-{p},{n})": u.bicomplex.dim(p, n)
            for p in range(args.P + 1)
            for n in range(args.Q + 1)
            if u.bicomplex.dim(p, n)
        },
        "first_page_single_class": u.first_page_is_single_class(),
    }
    _emit(json.dumps(out, sort_keys=True, indent=2), args.out)
    return 0


def cmd_check(args) -> int:
    params = {}
    for key in ("s", "t", "m", "P", "Q", "ell", "family"):
        val = getattr(args, key, None)
        if val is not None:
            params[key] = val
    if args.corrupt:
        params["corrupt"] = True
    rep = run_check(args.check_id, **params)
    text = (
        json.dumps(rep.to_dict(timings=args.timings), sort_keys=True, indent=2)
        if args.format == "json"
        else reports_csv([rep])
    )
    _emit(text, args.out)
    return 0 if rep.passed else 1


def cmd_report(args) -> int:
    battery = DEFAULT_BATTERY
    if args.checks:
        wanted = set(args.checks.split(","))
        battery = tuple(c for c in battery if c[0] in wanted)
    reports = []
    for cid, params in battery:
        reports.append(run_check(cid, **params))
    out_dir = Path(args.out or ".")
    out_dir.mkdir(parents=True, exist_ok=True)
    payload = [rep.to_dict(timings=args.timings) for rep in reports]
    if args.format == "json":
        (out_dir / "report.json").write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")
    else:
        (out_dir / "report.csv").write_text(reports_csv(reports))
    if args.figures:
        u = build_universal(1, 1, 4, 4)
        render_page_figure(page_dump(u.filtered, 1), out_dir / "universal_first_page.png",
                           "first page of the (1,1) example")
        f_small = total(small_model_bicomplex(u, p_max=4, n_max=4))
        render_page_figure(page_dump(f_small, 2), out_dir / "orbit_model_second_page.png",
                           "second page of the (1,1) orbit model")
    for rep in reports:
        print(f"{rep.check} {rep.params}: {rep.verdict}")
    return 0 if all(r.passed for r in reports) else 1


def _emit(text: str, out) -> None:
    if out:
        Path(out).write_text(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cosq",
        description="exact mod-2 spectral sequence engine over cosimplicial simplicial modules",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_m=False, with_ell=False):
        p.add_argument("--s", type=int, default=1)
        p.add_argument("--t", type=int, default=1)
        p.add_argument("--P", type=int, default=4)
        p.add_argument("--Q", type=int, default=4)
        if with_m:
            p.add_argument("--m", type=int, default=None)
        if with_ell:
            p.add_argument("--ell", type=int, default=None)
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--out", default=None)
        p.add_argument("--config", default=None, help="JSON family description")

    p = sub.add_parser("page", help="dump a spectral page")
    common(p)
    p.add_argument("--r", type=int, default=1)
    p.add_argument("--model", choices=("plain", "small-model", "orbit-square"), default=None)
    p.add_argument("--p-max", type=int, default=None)
    p.add_argument("--n-max", type=int, default=None)
    p.set_defaults(func=cmd_page)

    p = sub.add_parser("tot-homology", help="homology of the totalization")
    common(p, with_ell=True)
    p.add_argument("--q-top", type=int, default=None)
    p.add_argument("--degree", type=int, default=None)
    p.set_defaults(func=cmd_tot_homology)

    p = sub.add_parser("universal", help="summary of a universal example")
    common(p)
    p.set_defaults(func=cmd_universal)

    p = sub.add_parser("check", help="run one verification check")
    p.add_argument("check_id", choices=CHECK_IDS)
    for key in ("s", "t", "m", "P", "Q", "ell"):
        p.add_argument(f"--{key}", type=int, default=None)
    p.add_argument("--family", default=None)
    p.add_argument("--corrupt", action="store_true")
    p.add_argument("--timings", action="store_true")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("report", help="run the check battery and write reports")
    p.add_argument("--checks", default=None, help="comma-separated check ids")
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--figures", action="store_true")
    p.add_argument("--timings", action="store_true")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
