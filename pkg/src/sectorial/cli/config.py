"""Scenario files: JSON schema, loading, validation and round-trip emission.

Complex numbers are ``[re, im]`` pairs (bare reals are accepted on input),
matrices are row-major nested arrays.
"""

from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema
import numpy as np

from ..errors import (
    NotHermitian,
    NotInvertible,
    NotPositiveDefinite,
    ParseError,
    SchemaError,
    ValidationError,
)
from ..hilbert import Embedding, make_space
from ..holo import FormFamily

CHECK_ORDER = (
    "laxmilgram",
    "sector",
    "uniform_sector",
    "norm_equiv",
    "resolvent_holo",
    "eq5",
    "eq6",
    "thm4a",
    "thm4b",
    "remark_a",
)

DEFAULT_TOLERANCES = {
    "hermitian_rtol": 1e-12,
    "psd_rtol": 1e-10,
    "normalization_tol": 1e-10,
    "bound_slack": 1e-10,
    "composition_rtol": 1e-9,
    "tightness_rtol": 1e-8,
    "sampling_slack": 1e-10,
    "semiangle_slack": 1e-8,
    "holo_residual": 1e-8,
    "derivative_gap": 1e-6,
    "semigroup_residual": 1e-7,
    "monotone_noise": 1e-12,
    "eq6_ratio_min": 1.5,
    "eq6_ratio_max": 2.5,
    "norm_equiv_lower": 0.5,
    "norm_equiv_upper": 1.5,
}

# ratio windows and the norm-equivalence constants are not scaled by --tol-scale
SCALABLE = frozenset(DEFAULT_TOLERANCES) - {
    "eq6_ratio_min", "eq6_ratio_max", "norm_equiv_lower", "norm_equiv_upper",
}

DEFAULT_HOLO = {
    "radius": None,
    "radius_factor": 0.5,
    "node_count": 32,
    "compare_node_count": 16,
    "lambda": [0.0, 0.0],
    "boundary_samples": 25,
    "random_u": 100,
    "range_samples": 10000,
}

DEFAULT_SEMIGROUP = {
    "t1": 1.0,
    "t_grid": 21,
    "n_list": [64, 128, 256],
    "lambdas": [0.25, 0.5, 1.0, 2.0, 4.0],
    "n_max": 20,
    "theta_prime": math.pi / 4,
    "radius_tau": 1.0,
    "tau_grid": [5, 5],
    "M": 1.0,
    "omega": 0.0,
    "x": None,
    "iterate_n": 64,
    "enforce_sector": True,
}

_complex = {
    "oneOf": [
        {"type": "number"},
        {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
    ]
}
_vector = {"type": "array", "items": _complex, "minItems": 1}
_matrix = {"type": "array", "items": _vector, "minItems": 1}

SCHEMA = {
    "type": "object",
    "required": ["dim", "gram_V", "gram_H", "embedding", "coeffs", "domain_radius"],
    "additionalProperties": False,
    "properties": {
        "name": {"type": "string"},
        "description": {"type": "string"},
        "dim": {"type": "integer", "minimum": 1},
        "gram_V": _matrix,
        "gram_H": _matrix,
        "embedding": _matrix,
        "coeffs": {"type": "array", "items": _matrix, "minItems": 1},
        "domain_radius": {"type": "number", "exclusiveMinimum": 0},
        "shift": {"type": ["number", "null"]},
        "checks": {"type": "array", "items": {"enum": list(CHECK_ORDER)}, "uniqueItems": True},
        "tolerances": {
            "type": "object",
            "additionalProperties": False,
            "properties": {k: {"type": "number", "exclusiveMinimum": 0} for k in DEFAULT_TOLERANCES},
        },
        "seed": {"type": "integer", "minimum": 0},
        "holo": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "radius": {"type": ["number", "null"], "exclusiveMinimum": 0},
                "radius_factor": {"type": "number", "exclusiveMinimum": 0},
                "node_count": {"type": "integer", "minimum": 8},
                "compare_node_count": {"type": "integer", "minimum": 8},
                "lambda": _complex,
                "boundary_samples": {"type": "integer", "minimum": 1},
                "random_u": {"type": "integer", "minimum": 1},
                "range_samples": {"type": "integer", "minimum": 1},
            },
        },
        "semigroup": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "t1": {"type": "number", "exclusiveMinimum": 0},
                "t_grid": {"type": "integer", "minimum": 2},
                "n_list": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1},
                "lambdas": {"type": "array", "items": {"type": "number"}, "minItems": 1},
                "n_max": {"type": "integer", "minimum": 1},
                "theta_prime": {"type": "number", "exclusiveMinimum": 0},
                "radius_tau": {"type": "number", "exclusiveMinimum": 0},
                "tau_grid": {"type": "array", "items": {"type": "integer", "minimum": 1},
                             "minItems": 2, "maxItems": 2},
                "M": {"type": "number", "minimum": 1},
                "omega": {"type": "number"},
                "x": {"oneOf": [_vector, {"type": "null"}]},
                "iterate_n": {"type": ["integer", "null"], "minimum": 1},
                "enforce_sector": {"type": "boolean"},
            },
        },
        "expected": {
            "type": "object",
            "additionalProperties": {"enum": ["pass", "fail", "skip"]},
        },
    },
}


@dataclass(eq=False)
class Scenario:
    dim: int
    gram_V: np.ndarray
    gram_H: np.ndarray
    embedding: np.ndarray
    coeffs: list
    domain_radius: float
    shift: float | None = None
    checks: list = field(default_factory=list)
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    seed: int = 0
    holo: dict = field(default_factory=lambda: copy.deepcopy(DEFAULT_HOLO))
    semigroup: dict = field(default_factory=lambda: copy.deepcopy(DEFAULT_SEMIGROUP))
    expected: dict = field(default_factory=dict)
    name: str = "scenario"
    description: str = ""

    def ordered_checks(self) -> list:
        return [c for c in CHECK_ORDER if c in self.checks]

    def build_family(self) -> FormFamily:
        tol = self.tolerances["hermitian_rtol"]
        space_v = _validated_space(self.gram_V, "gram_V", tol)
        space_h = _validated_space(self.gram_H, "gram_H", tol)
        try:
            emb = Embedding(space_v, space_h, self.embedding)
        except NotInvertible as exc:
            raise ValidationError(str(exc), "embedding") from exc
        return FormFamily(emb, np.array(self.coeffs), self.domain_radius)

    def with_tol_scale(self, scale: float) -> Scenario:
        out = copy.copy(self)
        out.tolerances = {k: (v * scale if k in SCALABLE else v) for k, v in self.tolerances.items()}
        return out


def _validated_space(gram, role: str, tol: float):
    try:
        return make_space(gram, tol)
    except (NotHermitian, NotPositiveDefinite) as exc:
        exc.role = role
        raise ValidationError(str(exc).replace("gram", role, 1), role) from exc


def _to_complex(entry) -> complex:
    if isinstance(entry, list):
        return complex(entry[0], entry[1])
    return complex(entry)


def _matrix_from(data, dim: int, where: str) -> np.ndarray:
    rows = [[_to_complex(e) for e in row] for row in data]
    if len(rows) != dim or any(len(r) != dim for r in rows):
        raise SchemaError(f"expected a {dim}x{dim} matrix", where)
    return np.array(rows, dtype=np.complex128)


def _json_path(path) -> str:
    out = ""
    for p in path:
        out += f"[{p}]" if isinstance(p, int) else (f".{p}" if out else str(p))
    return out or "<root>"


def _line_of(text: str | None, key: str) -> int | None:
    if not text:
        return None
    needle = f'"{key}"'
    for i, line in enumerate(text.splitlines(), start=1):
        if needle in line:
            return i
    return None


def scenario_from_dict(data: dict, text: str | None = None) -> Scenario:
    """Validate a parsed config against the schema and the matrix roles."""
    validator = jsonschema.Draft7Validator(SCHEMA)
    errors = sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        where = _json_path(err.absolute_path)
        top = err.absolute_path[0] if err.absolute_path else None
        line = _line_of(text, top) if isinstance(top, str) else None
        raise SchemaError(err.message, where + (f" (line {line})" if line else ""))
    dim = data["dim"]
    loc = {k: f"{k}" + (f" (line {_line_of(text, k)})" if _line_of(text, k) else "")
           for k in ("gram_V", "gram_H", "embedding", "coeffs", "semigroup")}
    coeffs = [_matrix_from(m, dim, f"{loc['coeffs']}[{i}]") for i, m in enumerate(data["coeffs"])]
    tolerances = dict(DEFAULT_TOLERANCES)
    tolerances.update(data.get("tolerances", {}))
    holo = copy.deepcopy(DEFAULT_HOLO)
    holo.update(data.get("holo", {}))
    semigroup = copy.deepcopy(DEFAULT_SEMIGROUP)
    semigroup.update(data.get("semigroup", {}))
    if semigroup["x"] is not None and len(semigroup["x"]) != dim:
        raise SchemaError(f"x must have length {dim}", loc["semigroup"] + ".x")
    for key in ("node_count", "compare_node_count"):
        n = holo[key]
        if n & (n - 1):
            raise SchemaError("node counts must be powers of two", f"holo.{key}")
    scenario = Scenario(
        dim=dim,
        gram_V=_matrix_from(data["gram_V"], dim, loc["gram_V"]),
        gram_H=_matrix_from(data["gram_H"], dim, loc["gram_H"]),
        embedding=_matrix_from(data["embedding"], dim, loc["embedding"]),
        coeffs=coeffs,
        domain_radius=float(data["domain_radius"]),
        shift=data.get("shift"),
        checks=list(data.get("checks", [])),
        tolerances=tolerances,
        seed=int(data.get("seed", 0)),
        holo=holo,
        semigroup=semigroup,
        expected=dict(data.get("expected", {})),
        name=data.get("name", "scenario"),
        description=data.get("description", ""),
    )
    try:
        scenario.build_family()
    except ValidationError as exc:
        exc.location = loc.get(exc.role, exc.role)
        raise
    return scenario


def load_config(path) -> Scenario:
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from exc
    return scenario_from_dict(data, text)


def _encode_complex(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def _encode_matrix(mat) -> list:
    return [[_encode_complex(v) for v in row] for row in np.asarray(mat)]


def scenario_to_dict(scenario: Scenario) -> dict:
    semigroup = dict(scenario.semigroup)
    if semigroup.get("x") is not None:
        semigroup["x"] = [_encode_complex(v) for v in semigroup["x"]]
    holo = dict(scenario.holo)
    holo["lambda"] = _encode_complex(_to_complex(holo["lambda"]))
    return {
        "name": scenario.name,
        "description": scenario.description,
        "dim": scenario.dim,
        "gram_V": _encode_matrix(scenario.gram_V),
        "gram_H": _encode_matrix(scenario.gram_H),
        "embedding": _encode_matrix(scenario.embedding),
        "coeffs": [_encode_matrix(m) for m in scenario.coeffs],
        "domain_radius": scenario.domain_radius,
        "shift": scenario.shift,
        "checks": list(scenario.checks),
        "tolerances": dict(scenario.tolerances),
        "seed": scenario.seed,
        "holo": holo,
        "semigroup": semigroup,
        "expected": dict(scenario.expected),
    }


def dump_config(scenario: Scenario, path) -> None:
    Path(path).write_text(json.dumps(scenario_to_dict(scenario), indent=1) + "\n")
