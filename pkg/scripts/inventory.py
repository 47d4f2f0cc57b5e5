#!/usr/bin/env python3
"""Print the Morse inventory (critical points, indices, gradient norms)
and the connecting trajectory pair for both model systems."""

import numpy as np

from morseshadow.flow import FlowParams, find_trajectory_pair
from morseshadow.morse import (evaluate, find_critical_points,
                               sphere_height_system, torus_coscos_system)


def main() -> int:
    params = FlowParams()
    for sysd in (sphere_height_system(), torus_coscos_system()):
        print(f"== {sysd.function_id} on {sysd.manifold.kind}")
        pts = find_critical_points(sysd)
        for c in pts:
            gnorm = np.linalg.norm(evaluate(sysd, c.location)[1])
            print(f"   index {c.index}  F={c.value:+.6f}  "
                  f"|grad|={gnorm:.2e}  at {np.round(c.location, 6)}")
        chi = sum((-1) ** c.index for c in pts)
        print(f"   Euler characteristic (alternating sum): {chi}")
        pair = find_trajectory_pair(sysd, params)
        print(f"   trajectory pair: F({pair.p.location.round(4)}) -> "
              f"F({pair.q.location.round(4)}), separation "
              f"{pair.separation:.6f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
