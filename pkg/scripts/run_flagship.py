#!/usr/bin/env python3
"""End-to-end flagship run on the sphere system.

Certifies an epsilon for the band [-0.5, 0.5], builds and validates the
delta-pseudo-orbit of continua, refutes the full candidate suite of
would-be shadowing continua, runs the point-level positive control, and
renders an SVG of the orbit. Artifacts land in --out (default ./out).
"""

import argparse
import pathlib
import sys

from morseshadow import cli


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="out", help="artifact directory")
    ap.add_argument("--delta", type=float, default=0.05)
    ap.add_argument("--N", type=int, default=40)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    seed = str(args.seed)

    def step(name, argv):
        print(f"== {name}: morseshadow {' '.join(argv)}")
        rc = cli.run(argv)
        if rc != 0 and name != "refute":
            print(f"step {name!r} exited {rc}", file=sys.stderr)
            raise SystemExit(rc)
        return rc

    cert = out / "certificate.json"
    step("epsilon", ["epsilon", "--system", "sphere", "--seed", seed,
                     "--out", str(cert)])
    import json
    eps = json.loads(cert.read_text())["eps"]
    print(f"   certified eps = {eps:.6f}")

    po = out / "pseudo_orbit.json"
    step("build", ["build", "--system", "sphere", "--delta", repr(args.delta),
                   "--eps", repr(eps), "--N", str(args.N), "--seed", seed,
                   "--out", str(po)])
    step("validate", ["validate", str(po),
                      "--out", str(out / "validation.json")])
    step("refute", ["refute", str(po), "--family", "all", "--seed", seed,
                    "--out", str(out / "refutation.json")])
    step("shadow-base", ["shadow-base", "--system", "sphere",
                         "--delta", "0.01", "--eps", "0.15",
                         "--length", "50", "--count", "10", "--seed", seed,
                         "--out", str(out / "positive_control.json")])
    step("plot", ["plot", str(po), "--out", str(out / "pseudo_orbit.svg")])
    print(f"artifacts written to {out}/")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
