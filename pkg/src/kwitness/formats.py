"""JSON file formats for instances, certificates and failure reports (``format: 1``).

Scalars are written as decimal strings (``"-3"``, ``"5/7"``); integers are
accepted on input.  Positions are coordinate arrays, matrices arrays of
rows.  Matrices with no entries are omitted and re-created from the ranks.
Serialization is byte-deterministic for a fixed value.
"""

from __future__ import annotations

import json
from typing import Any

from .certificate import Certificate, Claim, Diagonal, Isomorphism, ShortExact
from .complexes import BinaryMulticomplex, ShapeError
from .formal import FormalSum
from .matrix import Matrix
from .nil import NilMulticomplex, check_nil_shape
from .rings import INTEGERS_KIND, LOCALIZED_KIND, RingError, RingSpec, format_scalar, parse_scalar

FORMAT_VERSION = 1


class ParseError(ValueError):
    """Malformed input; the message names the offending field or line."""


def dumps(obj: dict) -> str:
    return json.dumps(obj, indent=1, ensure_ascii=False) + "\n"


def loads(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


# -- writing -----------------------------------------------------------------

def ring_to_json(ring: RingSpec) -> dict:
    if ring.localized:
        return {"kind": LOCALIZED_KIND, "prime": ring.prime}
    return {"kind": INTEGERS_KIND}


def matrix_to_json(m: Matrix) -> list:
    return [[format_scalar(a) for a in row] for row in m.data]


def _position_maps(maps) -> list:
    return [{"position": list(x), "matrix": matrix_to_json(m)}
            for x, m in sorted(maps.items()) if m.rows and m.cols]


def complex_body(N: NilMulticomplex) -> dict:
    C = N.base
    return {
        "dimension": C.dimension,
        "ranks": [{"position": list(x), "rank": r} for x, r in sorted(C.ranks.items()) if r],
        "differentials": [
            {"direction": i, "d": _position_maps(C.maps(i, False)),
             "dTilde": _position_maps(C.maps(i, True))}
            for i in range(1, C.dimension + 1)
        ],
        "nil": [{"position": list(x), "matrix": matrix_to_json(m)}
                for x, m in sorted(N.nil.items()) if m.rows and not m.is_zero()],
    }


def instance_to_json(N: NilMulticomplex) -> dict:
    return {"format": FORMAT_VERSION, "kind": "instance", "ring": ring_to_json(N.ring),
            **complex_body(N)}


def _step_to_json(step) -> dict:
    if isinstance(step, ShortExact):
        return {"kind": "ShortExact", "sub": step.sub, "total": step.total,
                "quotient": step.quotient,
                "inclusion": _position_maps(step.inclusion),
                "projection": _position_maps(step.projection),
                "retraction": _position_maps(step.retraction),
                "section": _position_maps(step.section)}
    if isinstance(step, Diagonal):
        return {"kind": "Diagonal", "object": step.object, "direction": step.direction}
    if isinstance(step, Isomorphism):
        return {"kind": "Isomorphism", "left": step.left, "right": step.right,
                "maps": _position_maps(step.maps)}
    raise TypeError(f"unknown step {step!r}")


def certificate_to_json(cert: Certificate) -> dict:
    return {
        "format": FORMAT_VERSION,
        "kind": "certificate",
        "ring": ring_to_json(cert.ring),
        "registry": [{"id": key, **complex_body(obj)} for key, obj in cert.registry.items()],
        "targetPair": list(cert.target_pair),
        "steps": [_step_to_json(s) for s in cert.steps],
        "claim": {"target": dict(sorted(cert.claim.target.terms.items())),
                  "coefficients": list(cert.claim.coefficients)},
    }


def failure_to_json(failure) -> dict:
    """A ReductionFailure as an instance file plus an annotation block."""
    out = instance_to_json(failure.instance)
    sf = failure.split_failure
    out["annotation"] = {
        "result": "ReductionFailure",
        "strategy": failure.strategy,
        "object": failure.object_id,
        "depth": failure.depth,
        "exponent": sf.exponent,
        "part": sf.part,
        "failures": [
            {"position": [c for c in f.position], "direction": f.direction,
             "differential": f.differential, "reason": f.reason}
            for f in sf.failures
        ],
        "summary": failure.describe(),
    }
    return out


# -- reading -----------------------------------------------------------------

def _req(obj, key, path, kind=None):
    if not isinstance(obj, dict):
        raise ParseError(f"{path}: expected an object")
    if key not in obj:
        raise ParseError(f"{path}: missing field {key!r}")
    val = obj[key]
    if kind is not None and (not isinstance(val, kind) or isinstance(val, bool) and kind is int):
        raise ParseError(f"{path}.{key}: expected {getattr(kind, '__name__', kind)}")
    return val


def ring_from_json(obj, path="ring") -> RingSpec:
    kind = _req(obj, "kind", path, str)
    try:
        if kind == LOCALIZED_KIND:
            return RingSpec(kind, _req(obj, "prime", path, int))
        return RingSpec(kind)
    except RingError as exc:
        raise ParseError(f"{path}: {exc}") from exc


def _scalar(v, ring, path):
    if isinstance(v, bool) or not isinstance(v, (str, int)):
        raise ParseError(f"{path}: scalar must be a decimal string or integer")
    try:
        return ring.coerce(parse_scalar(v) if isinstance(v, str) else v)
    except RingError as exc:
        raise ParseError(f"{path}: {exc}") from exc


def matrix_from_json(rows, ring, shape, path) -> Matrix:
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise ParseError(f"{path}: matrix must be an array of rows")
    if not rows:
        return Matrix.zeros(ring, 0, shape[1])
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ParseError(f"{path}: ragged matrix rows")
    data = [[_scalar(v, ring, f"{path}[{i}][{j}]") for j, v in enumerate(r)]
            for i, r in enumerate(rows)]
    return Matrix(ring, data, len(rows), width, check=False)


def _position(v, dim, path) -> tuple:
    if not isinstance(v, list) or len(v) != dim or not all(
            isinstance(c, int) and not isinstance(c, bool) for c in v):
        raise ParseError(f"{path}: position must be {dim} integer coordinates")
    if any(c not in (0, 1, 2) for c in v):
        raise ParseError(f"{path}: position {v} outside the [0,2] support")
    return tuple(v)


def _maps_from_json(entries, ring, dim, shape_of, path) -> dict:
    if not isinstance(entries, list):
        raise ParseError(f"{path}: expected an array")
    out = {}
    for k, e in enumerate(entries):
        p = f"{path}[{k}]"
        x = _position(_req(e, "position", p), dim, f"{p}.position")
        if x in out:
            raise ParseError(f"{p}: duplicate position {list(x)}")
        shape = shape_of(x)
        if shape is None:
            raise ParseError(f"{p}: no map at position {list(x)}")
        out[x] = matrix_from_json(_req(e, "matrix", p), ring, shape, f"{p}.matrix")
    return out


def complex_from_json(obj, ring, path="") -> NilMulticomplex:
    dim = _req(obj, "dimension", path or "instance", int)
    if dim < 0:
        raise ParseError(f"{path}dimension: must be nonnegative")
    ranks = {}
    for k, e in enumerate(_req(obj, "ranks", path or "instance", list)):
        p = f"{path}ranks[{k}]"
        x = _position(_req(e, "position", p), dim, f"{p}.position")
        r = _req(e, "rank", p, int)
        if r < 0:
            raise ParseError(f"{p}.rank: must be nonnegative")
        ranks[x] = r

    def rank(x):
        return ranks.get(x, 0)

    diffs = _req(obj, "differentials", path or "instance", list)
    if len(diffs) != dim:
        raise ParseError(f"{path}differentials: {len(diffs)} entries for dimension {dim}")
    pairs = []
    for k, e in enumerate(diffs):
        p = f"{path}differentials[{k}]"
        i = _req(e, "direction", p, int)
        if i != k + 1:
            raise ParseError(f"{p}.direction: expected {k + 1}, got {i}")

        def shape_of(x, i=i):
            if x[i - 1] < 1:
                return None
            y = list(x)
            y[i - 1] -= 1
            return rank(tuple(y)), rank(x)

        pairs.append((_maps_from_json(_req(e, "d", p), ring, dim, shape_of, f"{p}.d"),
                      _maps_from_json(_req(e, "dTilde", p), ring, dim, shape_of, f"{p}.dTilde")))
    nil = _maps_from_json(obj.get("nil", []), ring, dim, lambda x: (rank(x), rank(x)),
                          f"{path}nil")
    try:
        base = BinaryMulticomplex.build(ring, dim, ranks, pairs)
        N = NilMulticomplex.build(base, nil)
    except ShapeError as exc:
        raise ParseError(f"{path or 'instance'}: {exc}") from exc
    return N


def instance_from_json(obj) -> NilMulticomplex:
    _check_header(obj, "instance")
    ring = ring_from_json(_req(obj, "ring", "instance"))
    N = complex_from_json(obj, ring)
    try:
        check_nil_shape(N)
    except ShapeError as exc:
        raise ParseError(f"instance: {exc}") from exc
    return N


def _check_header(obj, kind):
    if not isinstance(obj, dict):
        raise ParseError("top level: expected an object")
    fmt = obj.get("format")
    if fmt != FORMAT_VERSION:
        raise ParseError(f"format: expected {FORMAT_VERSION}, got {fmt!r}")
    got = obj.get("kind", kind)
    if got != kind:
        raise ParseError(f"kind: expected {kind!r}, got {got!r}")


def _pos_maps_step(e, key, ring, dim, shape_of, path):
    return _maps_from_json(_req(e, key, path), ring, dim, shape_of, f"{path}.{key}")


def certificate_from_json(obj) -> Certificate:
    _check_header(obj, "certificate")
    ring = ring_from_json(_req(obj, "ring", "certificate"))
    registry = {}
    for k, e in enumerate(_req(obj, "registry", "certificate", list)):
        p = f"registry[{k}]"
        key = _req(e, "id", p, str)
        if key in registry:
            raise ParseError(f"{p}.id: duplicate id {key!r}")
        registry[key] = complex_from_json(e, ring, f"{p}.")
    pair = _req(obj, "targetPair", "certificate", list)
    if len(pair) != 2 or not all(isinstance(s, str) for s in pair):
        raise ParseError("targetPair: expected two object ids")
    steps = []
    for k, e in enumerate(_req(obj, "steps", "certificate", list)):
        steps.append(_step_from_json(e, ring, registry, f"steps[{k}]"))
    claim = _req(obj, "claim", "certificate", dict)
    target = _req(claim, "target", "claim", dict)
    if not all(isinstance(v, int) and not isinstance(v, bool) for v in target.values()):
        raise ParseError("claim.target: coefficients must be integers")
    coeffs = _req(claim, "coefficients", "claim", list)
    if not all(isinstance(v, int) and not isinstance(v, bool) for v in coeffs):
        raise ParseError("claim.coefficients: must be integers")
    return Certificate(ring, registry, tuple(pair), tuple(steps),
                       Claim(FormalSum(target), tuple(coeffs)))


def _step_from_json(e, ring, registry, path):
    kind = _req(e, "kind", path, str)

    def obj(key):
        name = _req(e, key, path, str)
        return name, registry.get(name)

    def shapes(rows_of, cols_of):
        def shape_of(x):
            return rows_of(x), cols_of(x)
        return shape_of

    def filled(maps, ref, shape_of):
        # re-create omitted empty matrices; leave everything else to the verifier
        if ref is None:
            return maps
        for x in ref.base.ranks:
            r, c = shape_of(x)
            if x not in maps and (r == 0 or c == 0):
                maps[x] = Matrix.zeros(ring, r, c)
        return maps

    if kind == "ShortExact":
        sub, S = obj("sub")
        total, F = obj("total")
        quot, Q = obj("quotient")
        dim = F.dimension if F is not None else 0

        def rk(N):
            return (lambda x: N.rank(x)) if N is not None else (lambda x: 0)

        specs = {
            "inclusion": (rk(F), rk(S)), "projection": (rk(Q), rk(F)),
            "retraction": (rk(S), rk(F)), "section": (rk(F), rk(Q)),
        }
        maps = {}
        for key, (ro, co) in specs.items():
            shape_of = shapes(ro, co)
            m = _pos_maps_step(e, key, ring, dim, shape_of, path) if F is not None else {}
            maps[key] = filled(m, F, shape_of)
        return ShortExact(sub, total, quot, maps["inclusion"], maps["projection"],
                          maps["retraction"], maps["section"])
    if kind == "Diagonal":
        name, _ = obj("object")
        return Diagonal(name, _req(e, "direction", path, int))
    if kind == "Isomorphism":
        left, L = obj("left")
        right, R = obj("right")
        dim = L.dimension if L is not None else 0
        shape_of = shapes((lambda x: R.rank(x)) if R is not None else (lambda x: 0),
                          (lambda x: L.rank(x)) if L is not None else (lambda x: 0))
        m = _pos_maps_step(e, "maps", ring, dim, shape_of, path) if L is not None else {}
        return Isomorphism(left, right, filled(m, L, shape_of))
    raise ParseError(f"{path}.kind: unknown step kind {kind!r}")


def read_json_file(path) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from exc
    return loads(text)


def write_json_file(path, obj: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(obj))
