"""Corpus files: bump-sum fields crossed with sphere kernels, plus the exponent grid and auxiliary weights."""
from __future__ import annotations

import json
from pathlib import Path
from typing import Optional

import jsonschema
import numpy as np

from .grid import GridError, InequalityParams

FORMAT = "roughcalc-corpus"
VERSION = 1

_BUMP = {
    "type": "object",
    "required": ["center", "radius", "amplitude"],
    "properties": {
        "center": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 3},
        "radius": {"type": "number", "exclusiveMinimum": 0},
        "amplitude": {"type": "number"},
    },
    "additionalProperties": False,
}

CORPUS_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "required": ["format", "version", "entries"],
    "properties": {
        "format": {"const": FORMAT},
        "version": {"const": VERSION},
        "preset": {"type": "string"},
        "seed": {"type": "integer"},
        "exponents": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["rho", "alpha", "beta", "p"],
                "properties": {k: {"type": "number"} for k in ("rho", "alpha", "beta", "p")},
            },
        },
        "weights": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "domain", "form"],
                "properties": {
                    "id": {"type": "string"},
                    "domain": {"enum": ["rn", "halfline"]},
                    "form": {"enum": ["power", "const", "plateau"]},
                    "exponent": {"type": "number"},
                    "scale": {"type": "number", "exclusiveMinimum": 0},
                    "core": {"type": "number", "exclusiveMinimum": 0},
                },
            },
        },
        "young": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "kind"],
                "properties": {"id": {"type": "string"}, "kind": {"enum": ["power", "powerlog"]}},
            },
        },
        "poincare_alphas": {"type": "array", "items": {"type": "number", "minimum": 1}},
        "besov_s": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}},
        "entries": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "field", "kernel"],
                "properties": {
                    "id": {"type": "string"},
                    "field": {
                        "type": "object",
                        "required": ["dim", "halfwidth", "points_per_axis", "bumps"],
                        "properties": {
                            "dim": {"enum": [2, 3]},
                            "halfwidth": {"type": "number", "exclusiveMinimum": 0},
                            "points_per_axis": {"type": "integer", "minimum": 16},
                            "bumps": {"type": "array", "items": _BUMP},
                        },
                    },
                    "kernel": {
                        "type": "object",
                        "required": ["id", "kind"],
                        "properties": {
                            "id": {"type": "string"},
                            "kind": {"enum": ["harmonic", "sign", "power", "zero"]},
                        },
                    },
                },
            },
        },
    },
}


class CorpusError(ValueError):
    pass


# -- presets -------------------------------------------------------------------

HALFWIDTH = 4.0
DEFAULT_N = 256

LAYOUTS = {
    "centered": [((0.0, 0.0), 1.5, 1.0)],
    "offset": [((0.6, -0.4), 1.0, 1.0)],
    "pair": [((-1.2, 0.3), 0.8, 1.0), ((1.1, -0.2), 0.6, 0.6)],
    "cluster": [((-1.0, -1.0), 0.5, 1.0), ((0.8, 0.9), 0.7, 0.8), ((0.9, -1.1), 0.3, 1.2)],
}

STRESS_LAYOUTS = {
    "dipole": [((-0.5, 0.0), 0.45, 1.0), ((0.5, 0.0), 0.45, -1.0)],
    "narrow": [((0.2, 0.1), 0.25, 1.0)],
}

KERNELS = [
    {"id": "cos1", "kind": "harmonic", "k": 1, "phase": "cos"},
    {"id": "sin3", "kind": "harmonic", "k": 3, "phase": "sin"},
    {"id": "sign2", "kind": "sign", "arcs": 2},
    {"id": "sign6", "kind": "sign", "arcs": 6},
    {"id": "power0.4", "kind": "power", "a": 0.4},
]

STRESS_KERNELS = [
    {"id": "power0.53", "kind": "power", "a": 0.53},
    {"id": "power0.45", "kind": "power", "a": 0.45, "theta0": 1.0},
    {"id": "sign8", "kind": "sign", "arcs": 8},
    {"id": "zero", "kind": "zero"},
]

# interior and near-threshold points of the admissible (rho, alpha, beta, p) region for n = 2
EXPONENTS = [
    {"rho": 1.5, "alpha": 1.3, "beta": 1.7, "p": 2.0},
    {"rho": 1.5, "alpha": 1.25, "beta": 1.6, "p": 1.6},
    {"rho": 1.8, "alpha": 1.1, "beta": 1.5, "p": 1.5},
    {"rho": 1.2, "alpha": 1.55, "beta": 1.8, "p": 2.5},
    {"rho": 1.3, "alpha": 1.5, "beta": 1.9, "p": 3.0},
    {"rho": 1.6, "alpha": 1.4, "beta": 1.75, "p": 1.6},
]

STRESS_EXPONENTS = [
    {"rho": 1.5, "alpha": 1.2, "beta": 1.5, "p": 1.6},
    {"rho": 1.8, "alpha": 1.0588235294117647, "beta": 1.3, "p": 1.4},
    {"rho": 1.1, "alpha": 1.85, "beta": 1.95, "p": 2.2},
]

RN_WEIGHTS = [
    {"id": "w-const", "domain": "rn", "form": "const"},
    {"id": "w-pow0.5", "domain": "rn", "form": "power", "exponent": 0.5},
    {"id": "w-plateau-0.5", "domain": "rn", "form": "plateau", "exponent": -0.5, "core": 0.25},
]

HALFLINE_WEIGHTS = [
    {"id": "v-const", "domain": "halfline", "form": "const"},
    {"id": "v-pow-0.25", "domain": "halfline", "form": "power", "exponent": -0.25},
    {"id": "v-pow0.25", "domain": "halfline", "form": "power", "exponent": 0.25},
]

STRESS_WEIGHTS = [
    {"id": "w-pow-3", "domain": "rn", "form": "power", "exponent": -3.0},
    {"id": "v-pow2", "domain": "halfline", "form": "power", "exponent": 2.0},
]

YOUNG = [{"id": "A-power", "kind": "power"}, {"id": "A-powerlog", "kind": "powerlog"}]

PRESETS = ("default20", "stress", "tiny")


def _jittered(bumps, rng, amount: float = 0.05):
    out = []
    for center, radius, amp in bumps:
        c = np.asarray(center) + rng.uniform(-amount, amount, size=len(center))
        out.append({"center": [round(float(x), 6) for x in c], "radius": radius, "amplitude": amp})
    return out


def _entry(name, bumps, kernel, rng) -> dict:
    return {
        "id": f"{name}/{kernel['id']}",
        "field": {
            "dim": 2,
            "halfwidth": HALFWIDTH,
            "points_per_axis": DEFAULT_N,
            "bumps": _jittered(bumps, rng),
        },
        "kernel": dict(kernel),
    }


def make_corpus(preset: str = "default20", seed: int = 0) -> dict:
    rng = np.random.default_rng(seed)
    doc = {
        "format": FORMAT,
        "version": VERSION,
        "preset": preset,
        "seed": int(seed),
        "exponents": [dict(e) for e in EXPONENTS],
        "weights": [dict(w) for w in RN_WEIGHTS + HALFLINE_WEIGHTS],
        "young": [dict(y) for y in YOUNG],
        "poincare_alphas": [1.0, 1.3, 1.5],
        "besov_s": [1.0, 1.5],
        "entries": [],
    }
    if preset == "default20":
        for name, bumps in LAYOUTS.items():
            for kern in KERNELS:
                doc["entries"].append(_entry(name, bumps, kern, rng))
    elif preset == "stress":
        doc["exponents"] = [dict(e) for e in STRESS_EXPONENTS]
        doc["weights"] += [dict(w) for w in STRESS_WEIGHTS]
        layouts = dict(STRESS_LAYOUTS)
        layouts["centered"] = LAYOUTS["centered"]
        for name, bumps in layouts.items():
            for kern in STRESS_KERNELS[:3]:
                doc["entries"].append(_entry(name, bumps, kern, rng))
        doc["entries"].append(_entry("centered", LAYOUTS["centered"], STRESS_KERNELS[3], rng))
    elif preset == "tiny":
        doc["exponents"] = [dict(e) for e in EXPONENTS[:2]]
        picks = [("centered", KERNELS[0]), ("pair", KERNELS[2]), ("offset", KERNELS[4])]
        for name, kern in picks:
            doc["entries"].append(_entry(name, LAYOUTS[name], kern, rng))
    else:
        raise CorpusError(f"unknown preset {preset!r}; choose from {', '.join(PRESETS)}")
    validate_corpus(doc)
    return doc


def validate_corpus(doc: dict) -> None:
    try:
        jsonschema.validate(doc, CORPUS_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise CorpusError(f"corpus does not match the schema: {exc.message}") from exc
    dims = {e["field"]["dim"] for e in doc["entries"]}
    for e in doc.get("exponents", []):
        for dim in dims or {2}:
            try:
                InequalityParams(e["rho"], e["alpha"], e["beta"], e["p"], dim)
            except GridError as exc:
                raise CorpusError(f"exponent combo {e}: {exc}") from exc
    ids = [e["id"] for e in doc["entries"]]
    if len(set(ids)) != len(ids):
        raise CorpusError("entry ids must be unique")


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def write_corpus(doc: dict, path) -> None:
    Path(path).write_text(dumps(doc))


def load_corpus(path) -> dict:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise CorpusError(f"cannot read corpus {path}: {exc}") from exc
    validate_corpus(doc)
    return doc


def empty_corpus() -> dict:
    return {"format": FORMAT, "version": VERSION, "entries": []}
