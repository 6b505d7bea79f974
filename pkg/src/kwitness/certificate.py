"""Certificates that a Nil generator class [F, ν] - [F, 0] vanishes.

A certificate is a registry of Nil multicomplexes, an ordered list of
relation steps, and a claim: explicit integer coefficients with which the
step relations sum to the target difference.  Each short exact sequence
contributes [total] - [sub] - [quotient], each diagonal object contributes
[object], each isomorphism [left] - [right].
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Union

from .formal import FormalSum


@dataclass(frozen=True)
class ShortExact:
    sub: str
    total: str
    quotient: str
    inclusion: Mapping   # position -> Matrix, rank total x rank sub
    projection: Mapping  # position -> Matrix, rank quotient x rank total
    retraction: Mapping  # position -> Matrix, rank sub x rank total
    section: Mapping     # position -> Matrix, rank total x rank quotient

    kind = "ShortExact"

    def contribution(self) -> FormalSum:
        return FormalSum.of((self.total, 1), (self.sub, -1), (self.quotient, -1))


@dataclass(frozen=True)
class Diagonal:
    object: str
    direction: int

    kind = "Diagonal"

    def contribution(self) -> FormalSum:
        return FormalSum({self.object: 1})


@dataclass(frozen=True)
class Isomorphism:
    left: str
    right: str
    maps: Mapping        # position -> invertible Matrix from left to right

    kind = "Isomorphism"

    def contribution(self) -> FormalSum:
        return FormalSum.of((self.left, 1), (self.right, -1))


RelationStep = Union[ShortExact, Diagonal, Isomorphism]


@dataclass(frozen=True)
class Claim:
    target: FormalSum
    coefficients: tuple  # one integer per step


@dataclass(frozen=True)
class Certificate:
    ring: object
    registry: Mapping            # id -> NilMulticomplex
    target_pair: tuple           # (ν object id, zero object id)
    steps: tuple
    claim: Claim
