"""Command-line orchestration: build, validate, refute, search, plot.

Every subcommand is seeded (``--seed``, default 0) and single-valued in
its inputs, so repeated runs produce byte-identical JSON. ``--threads``
is accepted for symmetry with batch environments and must never change
any output value.

Exit codes: 0 success, 1 domain failure (e.g. a validation that fails),
2 input or parse errors.
"""

import argparse
import json
import os
import sys as _sys
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import serialize, svgfig
from .counterexample import (BandConfig, band_sets, build_pseudo_orbit,
                             build_X0, search_epsilon, validate_pseudo_orbit)
from .flow import FlowParams, find_trajectory_pair
from .morse import find_critical_points, sphere_height_system, torus_coscos_system
from .refuter import (FAMILIES, base_shadow_search, generate_base_pseudo_orbit,
                      generate_candidates, refute_all)

_SYSTEMS = {
    "sphere": sphere_height_system,
    "torus": torus_coscos_system,
}

_DEFAULT_BANDS = {
    "sphere": BandConfig(a=-1.0, b=1.0, a1=-0.5, b1=0.5),
    "torus": BandConfig(a=-2.0, b=2.0, a1=-0.5, b1=0.5),
}

# candidate suite for `refute --family all`
_FULL_SUITE = (
    ("x0_itself", 1),
    ("single_trajectory", 2),
    ("truncated_x0", 16),
    ("arc_through_p", 16),
    ("orbit_translate", 15),
)


@dataclass(frozen=True)
class RunConfig:
    """Validated flag set shared by the heavier subcommands."""

    system: str
    band: BandConfig
    delta: float
    eps: Optional[float]
    N: int
    h: Optional[float]
    seed: int
    out_path: Optional[str]


def _emit(doc, out_path):
    text = serialize.dumps(doc)
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _emit_text(text, out_path):
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        print(text, end="")


def _system(args):
    return _SYSTEMS[args.system]()


def _band(args):
    base = _DEFAULT_BANDS[args.system]
    return BandConfig(
        a=base.a if args.a is None else args.a,
        b=base.b if args.b is None else args.b,
        a1=base.a1 if args.a1 is None else args.a1,
        b1=base.b1 if args.b1 is None else args.b1,
    )


def _load_po(path):
    with open(path) as fh:
        return serialize.pseudo_orbit_from_json(json.load(fh))


def _cmd_critpoints(args):
    sysd = _system(args)
    pts = find_critical_points(sysd)
    _emit([serialize.critical_point_to_json(c) for c in pts], args.out)
    return 0


def _cmd_pair(args):
    sysd = _system(args)
    pair = find_trajectory_pair(sysd, FlowParams(),
                                n_directions=args.directions)
    _emit(serialize.pair_to_json(pair), args.out)
    return 0


def _cmd_epsilon(args):
    sysd = _system(args)
    band = _band(args)
    pair = find_trajectory_pair(sysd, FlowParams())
    x0 = build_X0(sysd.manifold, pair, h=args.h or 0.00625)
    cert = search_epsilon(sysd, x0, pair, band,
                          n_samples=args.samples, seed=args.seed)
    _emit(serialize.certificate_to_json(cert), args.out)
    return 0


def _cmd_build(args):
    sysd = _system(args)
    band = _band(args)
    pair = find_trajectory_pair(sysd, FlowParams())
    eps = args.eps
    if eps is None:
        x0 = build_X0(sysd.manifold, pair, h=args.h or 0.00625)
        eps = search_epsilon(sysd, x0, pair, band, seed=args.seed).eps
    po = build_pseudo_orbit(sysd, pair, band, eps=eps, delta=args.delta,
                            N=args.N, h=args.h)
    _emit(serialize.pseudo_orbit_to_json(po), args.out)
    return 0


def _cmd_validate(args):
    po = _load_po(args.orbit)
    sysd = _SYSTEMS["sphere" if "sphere" in po.system_id else "torus"]()
    rep = validate_pseudo_orbit(sysd, po)
    _emit(serialize.validation_to_json(rep), args.out)
    return 0 if rep.ok else 1


def _cmd_refute(args):
    po = _load_po(args.orbit)
    sysd = _SYSTEMS["sphere" if "sphere" in po.system_id else "torus"]()
    pair = find_trajectory_pair(sysd, FlowParams())
    ls = band_sets(sysd, pair, po.band, po.eps, x0=po.X[0], h=po.h)
    if args.family == "all":
        suite = _FULL_SUITE
    else:
        suite = ((args.family, args.count),)
    cands = []
    for family, count in suite:
        cands.extend(generate_candidates(sysd, po, family, count,
                                         seed=args.seed))
    report = refute_all(sysd, po, cands, ls)
    _emit(serialize.refutation_to_json(report), args.out)
    return 0 if report.summary()["inconclusive"] == 0 else 1


def _cmd_shadow_base(args):
    sysd = _system(args)
    params = FlowParams(step=2.5e-2)
    runs = []
    for k in range(args.count):
        seed = args.seed + k
        orbit = generate_base_pseudo_orbit(sysd, args.length, args.delta,
                                           seed, params)
        found, x, sup = base_shadow_search(sysd, orbit, args.delta,
                                           args.eps, seed=seed,
                                           params=params)
        runs.append({"seed": seed, "found": found, "sup_err": sup,
                     "x": x})
    doc = {
        "delta": args.delta,
        "eps": args.eps,
        "length": args.length,
        "runs": runs,
        "summary": {
            "total": len(runs),
            "found": sum(1 for r in runs if r["found"]),
        },
    }
    _emit(doc, args.out)
    return 0 if doc["summary"]["found"] == doc["summary"]["total"] else 1


def _cmd_plot(args):
    po = _load_po(args.orbit)
    sysd = _SYSTEMS["sphere" if "sphere" in po.system_id else "torus"]()
    pair = find_trajectory_pair(sysd, FlowParams())
    ls = band_sets(sysd, pair, po.band, po.eps, x0=po.X[0], h=po.h)
    _emit_text(svgfig.render_svg(po, ls), args.out)
    return 0


def _add_common(p):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int,
                   default=os.cpu_count() or 1,
                   help="worker count; never affects output values")
    p.add_argument("--out", default=None)


def _add_system(p):
    p.add_argument("--system", choices=sorted(_SYSTEMS), default="sphere")


def _add_band(p):
    p.add_argument("--a", type=float, default=None)
    p.add_argument("--b", type=float, default=None)
    p.add_argument("--a1", type=float, default=None)
    p.add_argument("--b1", type=float, default=None)


def _build_parser():
    ap = argparse.ArgumentParser(
        prog="morseshadow",
        description=("Numerical laboratory for shadowing of the time-one "
                     "map of a surface gradient flow and its induced map "
                     "on the hyperspace of continua."),
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("critpoints", help="critical point inventory")
    _add_system(p)
    _add_common(p)
    p.set_defaults(fn=_cmd_critpoints)

    p = sub.add_parser("pair", help="two connecting trajectories p -> q")
    _add_system(p)
    p.add_argument("--directions", type=int, default=16)
    _add_common(p)
    p.set_defaults(fn=_cmd_pair)

    p = sub.add_parser("epsilon", help="band condition certificate")
    _add_system(p)
    _add_band(p)
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--h", type=float, default=None)
    _add_common(p)
    p.set_defaults(fn=_cmd_epsilon)

    p = sub.add_parser("build", help="build the hyperspace pseudo-orbit")
    _add_system(p)
    _add_band(p)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--N", type=int, default=40)
    p.add_argument("--h", type=float, default=None)
    _add_common(p)
    p.set_defaults(fn=_cmd_build)

    p = sub.add_parser("validate", help="re-verify a stored pseudo-orbit")
    p.add_argument("orbit")
    _add_common(p)
    p.set_defaults(fn=_cmd_validate)

    p = sub.add_parser("refute", help="refute candidate shadowing continua")
    p.add_argument("orbit")
    p.add_argument("--family", choices=("all",) + FAMILIES, default="all")
    p.add_argument("--count", type=int, default=1)
    _add_common(p)
    p.set_defaults(fn=_cmd_refute)

    p = sub.add_parser("shadow-base",
                       help="positive control: shadowing in the base space")
    _add_system(p)
    p.add_argument("--delta", type=float, default=0.01)
    p.add_argument("--eps", type=float, default=0.15)
    p.add_argument("--length", type=int, default=50)
    p.add_argument("--count", type=int, default=1)
    _add_common(p)
    p.set_defaults(fn=_cmd_shadow_base)

    p = sub.add_parser("plot", help="SVG figure for a stored pseudo-orbit")
    p.add_argument("orbit")
    _add_common(p)
    p.set_defaults(fn=_cmd_plot)

    return ap


def run(argv=None) -> int:
    ap = _build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"input error: {exc}", file=_sys.stderr)
        return 2
    except Exception as exc:  # domain failures from the package
        print(f"error: {type(exc).__name__}: {exc}", file=_sys.stderr)
        return 1


def main():  # console entry point
    raise SystemExit(run())


if __name__ == "__main__":
    main()
