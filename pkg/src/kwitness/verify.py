"""Replay verifier for certificates.

Uses only exact linear algebra, complex validation and formal sums; it never
touches the splitting or reduction code, so a certificate is trusted only
for what it spells out.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .certificate import Certificate, Diagonal, Isomorphism, ShortExact
from .complexes import ShapeError, shift
from .formal import FormalSum, combine, formal_membership
from .linalg import all_units, invariant_factors, is_invertible, rank
from .matrix import Matrix
from .nil import NilMulticomplex, validate_nil


@dataclass(frozen=True)
class Verdict:
    accepted: bool
    location: Optional[str] = None  # "object <id>", "step <k>" or "claim"
    reason: Optional[str] = None

    def __str__(self):
        if self.accepted:
            return "accept"
        return f"reject: {self.location}: {self.reason}"


class _Reject(Exception):
    pass


def _need(cond: bool, reason: str):
    if not cond:
        raise _Reject(reason)


def _shape(m: Matrix, rows: int, cols: int, what: str):
    _need(isinstance(m, Matrix) and m.shape == (rows, cols),
          f"{what}: shape {getattr(m, 'shape', None)}, expected {rows}x{cols}")


def _same_grading(a: NilMulticomplex, b: NilMulticomplex, what: str):
    _need(a.dimension == b.dimension, f"{what}: dimensions differ")


def _check_short_exact(step: ShortExact, reg) -> None:
    for key in (step.sub, step.total, step.quotient):
        _need(key in reg, f"unknown object {key!r}")
    S, F, Q = reg[step.sub], reg[step.total], reg[step.quotient]
    _same_grading(S, F, "sub/total")
    _same_grading(Q, F, "quotient/total")
    ring = F.ring
    for x, rt in F.base.ranks.items():
        rs, rq = S.rank(x), Q.rank(x)
        where = f"position {list(x)}"
        for mp in (step.inclusion, step.projection, step.retraction, step.section):
            _need(x in mp, f"{where}: missing matrix")
        inc, proj = step.inclusion[x], step.projection[x]
        ret, sec = step.retraction[x], step.section[x]
        _shape(inc, rt, rs, f"{where} inclusion")
        _shape(proj, rq, rt, f"{where} projection")
        _shape(ret, rs, rt, f"{where} retraction")
        _shape(sec, rt, rq, f"{where} section")
        _need(rs + rq == rt, f"{where}: ranks {rs} + {rq} ≠ {rt}")
        _need((proj @ inc).is_zero(), f"{where}: projection ∘ inclusion ≠ 0")
        _need(rank(inc) == rs and all_units(ring, invariant_factors(inc)),
              f"{where}: inclusion not injective with saturated image")
        _need(rank(proj) == rq and all_units(ring, invariant_factors(proj)),
              f"{where}: projection not surjective")
        _need((ret @ inc).is_identity(), f"{where}: retraction ∘ inclusion ≠ identity")
        _need((proj @ sec).is_identity(), f"{where}: projection ∘ section ≠ identity")
        _need(F.nil[x] @ inc == inc @ S.nil[x], f"{where}: inclusion does not commute with ν")
        _need(proj @ F.nil[x] == Q.nil[x] @ proj, f"{where}: projection does not commute with ν")
    for i in range(1, F.dimension + 1):
        for tilde in (False, True):
            for x in F.base.maps(i, tilde):
                y = shift(x, i)
                where = f"direction {i} {'dTilde' if tilde else 'd'} at {list(x)}"
                _need(F.base.d(i, x, tilde) @ step.inclusion[x]
                      == step.inclusion[y] @ S.base.d(i, x, tilde),
                      f"{where}: inclusion square does not commute")
                _need(step.projection[y] @ F.base.d(i, x, tilde)
                      == Q.base.d(i, x, tilde) @ step.projection[x],
                      f"{where}: projection square does not commute")


def _check_diagonal(step: Diagonal, reg) -> None:
    _need(step.object in reg, f"unknown object {step.object!r}")
    T = reg[step.object]
    _need(isinstance(step.direction, int) and 1 <= step.direction <= T.dimension,
          f"direction {step.direction} outside 1..{T.dimension}")
    _need(T.base.maps(step.direction, False) == T.base.maps(step.direction, True),
          f"differential pair in direction {step.direction} is not diagonal")
    _need(T.is_zero_endomorphism(), "diagonal object carries a nonzero endomorphism")


def _check_isomorphism(step: Isomorphism, reg) -> None:
    for key in (step.left, step.right):
        _need(key in reg, f"unknown object {key!r}")
    L, R = reg[step.left], reg[step.right]
    _same_grading(L, R, "left/right")
    for x, r in L.base.ranks.items():
        where = f"position {list(x)}"
        _need(x in step.maps, f"{where}: missing matrix")
        m = step.maps[x]
        _shape(m, R.rank(x), r, f"{where} isomorphism")
        _need(is_invertible(m), f"{where}: map not invertible over the ring")
        _need(m @ L.nil[x] == R.nil[x] @ m, f"{where}: map does not commute with ν")
    for i in range(1, L.dimension + 1):
        for tilde in (False, True):
            for x in L.base.maps(i, tilde):
                _need(step.maps[shift(x, i)] @ L.base.d(i, x, tilde)
                      == R.base.d(i, x, tilde) @ step.maps[x],
                      f"direction {i} {'dTilde' if tilde else 'd'} at {list(x)}: "
                      "square does not commute")


_CHECKS = {ShortExact: _check_short_exact, Diagonal: _check_diagonal,
           Isomorphism: _check_isomorphism}


def _check_claim(cert: Certificate) -> None:
    reg = cert.registry
    nu_id, zero_id = cert.target_pair
    _need(nu_id in reg and zero_id in reg, "target pair names unknown objects")
    _need(reg[nu_id].base == reg[zero_id].base, "target pair has different base complexes")
    _need(reg[zero_id].is_zero_endomorphism(), "zero object of the target pair has ν ≠ 0")
    expected = FormalSum.of((nu_id, 1), (zero_id, -1))
    _need(cert.claim.target == expected, f"claimed target {cert.claim.target} ≠ {expected}")
    relations = [s.contribution() for s in cert.steps]
    coeffs = list(cert.claim.coefficients)
    _need(len(coeffs) == len(relations),
          f"{len(coeffs)} coefficients for {len(relations)} steps")
    _need(combine(coeffs, relations) == expected,
          "claimed coefficients do not sum to the target")
    ok, _ = formal_membership(expected, relations)
    _need(ok, "target is not in the span of the step relations")


def verify_certificate(cert: Certificate) -> Verdict:
    """Accept iff every object, every step and the claim replay exactly.

    The earliest failing check (objects by id, then steps in order, then the
    claim) is reported.
    """
    reg = cert.registry
    for key in sorted(reg):
        obj = reg[key]
        try:
            _need(obj.ring == cert.ring, f"ring {obj.ring} ≠ certificate ring {cert.ring}")
            report = validate_nil(obj)
        except (_Reject, ShapeError) as exc:
            return Verdict(False, f"object {key}", str(exc))
        if not report.passed:
            return Verdict(False, f"object {key}", "; ".join(map(str, report.failures)))
    for k, step in enumerate(cert.steps):
        check = _CHECKS.get(type(step))
        if check is None:
            return Verdict(False, f"step {k}", f"unknown step kind {type(step).__name__}")
        try:
            check(step, reg)
        except _Reject as exc:
            return Verdict(False, f"step {k}", f"{step.kind}: {exc}")
        except (ValueError, KeyError, TypeError) as exc:
            return Verdict(False, f"step {k}", f"{step.kind}: malformed ({exc})")
    try:
        _check_claim(cert)
    except _Reject as exc:
        return Verdict(False, "claim", str(exc))
    except (ValueError, KeyError, TypeError) as exc:
        return Verdict(False, "claim", f"malformed ({exc})")
    return Verdict(True)
