"""JSON schemas for problem, truth, and solution files.

Complex numbers are serialized as [re, im] arrays uniformly; floats rely on
Python's shortest round-trip repr, so all numeric fields survive a
serialize / parse cycle exactly.
"""
from __future__ import annotations

import json
from typing import Any

import numpy as np

from .bases import BasisSpec, MomentVector
from .bivariate import DiracMeasure2D
from .exceptions import ValidationError
from .measures import DiracMeasure, Spline
from .splines import SplineProblem

KINDS = ("spikes", "spline", "spikes2d")


def _c(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def _from_c(v) -> complex:
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, list) and len(v) == 2:
        return complex(v[0], v[1])
    raise ValidationError(f"expected [re, im] pair, got {v!r}")


def dump_json(obj: dict, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=1, sort_keys=True)
        fh.write("\n")


def load_json(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)


# -- problem files -----------------------------------------------------------

def problem_to_dict(kind: str, basis: str, N: int, moments,
                    spline: dict | None = None) -> dict:
    out = {
        "kind": kind,
        "basis": basis,
        "N": int(N),
        "moments": [_c(v) for v in np.asarray(moments).ravel()],
    }
    if spline is not None:
        out["spline"] = spline
    return out


def parse_problem(data: dict) -> dict:
    """Validate a problem dict and attach decoded fields."""
    kind = data.get("kind")
    if kind not in KINDS:
        raise ValidationError(f"unknown problem kind {kind!r}")
    basis = data.get("basis")
    N = data.get("N")
    if not isinstance(N, int) or N < 0:
        raise ValidationError("N must be a nonnegative integer")
    moments = [_from_c(v) for v in data.get("moments", [])]
    expected = (N + 1) ** 2 if kind == "spikes2d" else N + 1
    if len(moments) != expected:
        raise ValidationError(
            f"expected {expected} moments for kind {kind}, got {len(moments)}"
        )
    if (kind == "spline") != ("spline" in data):
        raise ValidationError(
            "spline record must be present iff kind is 'spline'"
        )
    out = dict(data)
    if kind == "spikes2d":
        Y = np.array(moments, dtype=complex).reshape(N + 1, N + 1)
        if np.max(np.abs(Y.imag)) > 0:
            raise ValidationError("2D moments must be real")
        out["moment_matrix"] = Y.real
    else:
        spec = BasisSpec(basis, N)
        out["moment_vector"] = MomentVector(spec, moments)
    if kind == "spline":
        rec = data["spline"]
        out["spline_problem"] = SplineProblem(
            out["moment_vector"],
            int(rec["degree_r"]),
            [_from_c(v) for v in rec["boundary_left"]],
            [_from_c(v) for v in rec["boundary_right"]],
        )
    return out


# -- truth files -------------------------------------------------------------

def measure_to_dict(m: DiracMeasure) -> dict:
    return {
        "kind": "spikes",
        "atoms": [{"location": x, "weight": _c(w)} for x, w in m.atoms],
    }


def measure_from_dict(data: dict) -> DiracMeasure:
    return DiracMeasure(
        [(a["location"], _from_c(a["weight"])) for a in data["atoms"]]
    )


def measure2d_to_dict(m: DiracMeasure2D) -> dict:
    return {
        "kind": "spikes2d",
        "atoms": [
            {"location": list(loc), "weight": w} for loc, w in m.atoms
        ],
    }


def measure2d_from_dict(data: dict) -> DiracMeasure2D:
    return DiracMeasure2D(
        [(tuple(a["location"]), a["weight"]) for a in data["atoms"]]
    )


def spline_to_dict(s: Spline) -> dict:
    return {
        "kind": "spline",
        "degree_r": s.degree_r,
        "knots": list(s.knots),
        "pieces": [[_c(c) for c in p] for p in s.pieces],
        "boundary_left": [_c(v) for v in s.boundary_left],
        "boundary_right": [_c(v) for v in s.boundary_right],
    }


def spline_from_dict(data: dict) -> Spline:
    return Spline(
        data["degree_r"],
        data["knots"],
        [[_from_c(c) for c in p] for p in data["pieces"]],
    )


def truth_from_dict(data: dict):
    kind = data.get("kind")
    if kind == "spikes":
        return measure_from_dict(data)
    if kind == "spikes2d":
        return measure2d_from_dict(data)
    if kind == "spline":
        return spline_from_dict(data)
    raise ValidationError(f"unknown truth kind {kind!r}")


# -- solution files ----------------------------------------------------------

def solution_to_dict(kind: str, *, atoms=None, spline: Spline | None = None,
                     residuals: dict | None = None, options: dict | None = None,
                     timing_ms: float | None = None,
                     warnings: list[str] | None = None,
                     error: dict | None = None) -> dict:
    out: dict[str, Any] = {"kind": kind, "warnings": warnings or []}
    if atoms is not None:
        out["atoms"] = atoms
    if spline is not None:
        out["spline"] = spline_to_dict(spline)
    out["residuals"] = residuals or {}
    out["options"] = options or {}
    if timing_ms is not None:
        out["timing_ms"] = timing_ms
    if error is not None:
        out["error"] = error
    return out
