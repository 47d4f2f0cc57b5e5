"""Deterministic JSON persistence for all artifact types.

Floats are written with 17 significant digits, which round-trips every
IEEE double exactly; keys are emitted in sorted order, so equal inputs
always produce byte-identical documents.
"""

import json
from typing import Dict

import numpy as np

from .counterexample import (BandConfig, EpsilonCertificate, PseudoOrbit,
                             ValidationReport)
from .flow import Trajectory, TrajectoryPair
from .geometry import ModelManifold
from .hyperspace import Continuum
from .morse import CriticalPoint
from .refuter import RefutationReport


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if x is None:
        return "null"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        v = float(x)
        if v != v or v in (float("inf"), float("-inf")):
            raise ValueError(f"non-finite float {v!r} is not serializable")
        s = format(v, ".17g")
        # keep a numeric JSON token (17g may emit a bare integer form)
        return s
    if isinstance(x, str):
        return json.dumps(x)
    if isinstance(x, np.ndarray):
        return _fmt(x.tolist())
    if isinstance(x, (list, tuple)):
        return "[" + ",".join(_fmt(v) for v in x) + "]"
    if isinstance(x, dict):
        items = sorted(x.items(), key=lambda kv: kv[0])
        return "{" + ",".join(
            f"{json.dumps(str(k))}:{_fmt(v)}" for k, v in items) + "}"
    raise TypeError(f"cannot serialize {type(x).__name__}")


def dumps(obj) -> str:
    """Serialize a JSON-ready structure with lossless float formatting."""
    return _fmt(obj)


def continuum_to_json(A: Continuum) -> Dict:
    return {
        "manifold": A.manifold.kind,
        "h": A.h,
        "points": A.points,
    }


def continuum_from_json(doc: Dict) -> Continuum:
    m = ModelManifold(doc["manifold"])
    return Continuum(manifold=m, h=float(doc["h"]),
                     points=np.asarray(doc["points"], dtype=float))


def band_to_json(b: BandConfig) -> Dict:
    return {"a": b.a, "a1": b.a1, "b1": b.b1, "b": b.b}


def band_from_json(doc: Dict) -> BandConfig:
    return BandConfig(a=float(doc["a"]), a1=float(doc["a1"]),
                      b1=float(doc["b1"]), b=float(doc["b"]))


def critical_point_to_json(c: CriticalPoint) -> Dict:
    return {
        "location": c.location,
        "value": c.value,
        "index": c.index,
        "hessian_eigenvalues": c.hessian_eigenvalues,
    }


def trajectory_to_json(t: Trajectory) -> Dict:
    return {
        "times": t.times,
        "points": t.points,
        "origin": critical_point_to_json(t.origin),
        "terminus": critical_point_to_json(t.terminus),
    }


def pair_to_json(pair: TrajectoryPair) -> Dict:
    return {
        "p": critical_point_to_json(pair.p),
        "q": critical_point_to_json(pair.q),
        "gamma1": trajectory_to_json(pair.gamma1),
        "gamma2": trajectory_to_json(pair.gamma2),
        "separation": pair.separation,
    }


def certificate_to_json(c: EpsilonCertificate) -> Dict:
    return {
        "eps": c.eps,
        "disjointness_margin": c.disjointness_margin,
        "nojump_min_excess": c.nojump_min_excess,
        "stays_min_clearance": c.stays_min_clearance,
        "ball_condition_margin": c.ball_condition_margin,
        "sample_counts": dict(c.sample_counts),
        "band": band_to_json(c.band),
    }


def pseudo_orbit_to_json(po: PseudoOrbit) -> Dict:
    return {
        "system": po.system_id,
        "band": band_to_json(po.band),
        "eps": po.eps,
        "delta": po.delta,
        "M": po.M,
        "N": po.N,
        "h": po.h,
        "orbit": [
            {"n": n, "continuum": continuum_to_json(po.X[n])}
            for n in sorted(po.X)
        ],
    }


def pseudo_orbit_from_json(doc: Dict) -> PseudoOrbit:
    X = {int(rec["n"]): continuum_from_json(rec["continuum"])
         for rec in doc["orbit"]}
    return PseudoOrbit(
        system_id=doc["system"],
        band=band_from_json(doc["band"]),
        eps=float(doc["eps"]),
        delta=float(doc["delta"]),
        M=int(doc["M"]),
        N=int(doc["N"]),
        h=float(doc["h"]),
        X=X,
    )


def validation_to_json(rep: ValidationReport) -> Dict:
    return {
        "ok": rep.ok,
        "max_link": rep.max_link,
        "argmax_link": rep.argmax_link,
        "min_link": rep.min_link,
        "end_forward": rep.end_forward,
        "end_backward": rep.end_backward,
        "threshold": rep.threshold,
        "end_threshold": rep.end_threshold,
        "links": [
            {"n": l.n, "value": l.value, "passed": l.passed}
            for l in rep.links
        ],
    }


def refutation_to_json(rep: RefutationReport) -> Dict:
    recs = []
    for cert in rep.certificates:
        rec = {
            "family": cert.candidate.family,
            "params": dict(cert.candidate.params),
            "seed": cert.candidate.seed,
            "verdict": cert.verdict,
        }
        if cert.direct is not None:
            d = cert.direct
            rec["details"] = {
                "n": d.n,
                "value": d.value,
                "witness_ab": [d.witness_ab[0], d.witness_ab[1]],
                "witness_ba": [d.witness_ba[0], d.witness_ba[1]],
            }
        elif cert.structural is not None:
            s = cert.structural
            rec["details"] = {
                "n0": s.n0,
                "constant_label": s.constant_label,
                "horizon": s.horizon,
                "non_entry_verified": s.non_entry_verified,
                "violated_index": s.violated_index,
                "labels": list(s.labels),
            }
        recs.append(rec)
    return {
        "eps": rep.eps,
        "threshold": rep.threshold,
        "candidates": recs,
        "summary": rep.summary(),
    }
