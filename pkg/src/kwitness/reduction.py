"""The reduction driver: builds certificates by telescoping kernel filtrations.

Splitting (F, ν) along ker ν^e gives two short exact sequences over the
same lattices, one carrying ν and one carrying 0:

    [F,ν] - [F,0] = SES_ν - SES_0 + ([K,ν|K] - [K,0]) + ([Q,ν̄] - [Q,0])

and the two smaller differences are reduced the same way.  Every layer
lowers the nilpotency index of both halves, which bounds the recursion.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .certificate import Certificate, Claim, Isomorphism, ShortExact
from .filtration import MAX_INDEX, MIN_INDEX, SplitFailure, layer_split
from .formal import FormalSum
from .linalg import InternalInvariantViolation
from .matrix import Matrix
from .nil import NilMulticomplex, nil_index, validate_nil


@dataclass(frozen=True)
class ReductionFailure:
    strategy: str
    split_failure: SplitFailure
    instance: NilMulticomplex    # the object whose split failed
    depth: int                   # 0 when the input itself failed to split
    object_id: str

    def describe(self) -> list[str]:
        head = (f"layer split failed on object {self.object_id} at depth {self.depth} "
                f"(strategy {self.strategy}, exponent {self.split_failure.exponent}, "
                f"part {self.split_failure.part})")
        return [head] + self.split_failure.describe()


class _Abort(Exception):
    def __init__(self, failure: ReductionFailure):
        self.failure = failure


def _identity_maps(N: NilMulticomplex) -> dict:
    return {x: Matrix.identity(N.ring, r) for x, r in N.base.ranks.items()}


@dataclass
class _Builder:
    strategy: str
    budget: int
    registry: dict = field(default_factory=dict)
    steps: list = field(default_factory=list)
    coefficients: list = field(default_factory=list)
    counter: int = 0

    def register(self, prefix: str, obj: NilMulticomplex) -> str:
        self.counter += 1
        key = f"{prefix}{self.counter}"
        self.registry[key] = obj
        return key

    def emit(self, step, coefficient: int):
        self.steps.append(step)
        self.coefficients.append(coefficient)

    def reduce_pair(self, nu_id: str, zero_id: str, depth: int):
        """Emit steps whose weighted sum is [nu_id] - [zero_id]."""
        obj = self.registry[nu_id]
        if nu_id == zero_id:
            return
        if obj.is_zero_endomorphism():
            self.emit(Isomorphism(nu_id, zero_id, _identity_maps(obj)), 1)
            return
        if depth >= self.budget:
            raise InternalInvariantViolation(
                f"reduction did not terminate within {self.budget} layers")
        layer = layer_split(obj, self.strategy)
        if isinstance(layer, SplitFailure):
            raise _Abort(ReductionFailure(self.strategy, layer, obj, depth, nu_id))
        sub_zero = layer.sub.zero_partner()
        if layer.sub.is_zero_endomorphism():
            k_nu = k_zero = self.register("K", layer.sub)
        else:
            k_nu = self.register("K", layer.sub)
            k_zero = self.register("K", sub_zero)
        q_nu = self.register("Q", layer.quotient)
        q_zero = self.register("Q", layer.quotient.zero_partner())
        mats = (layer.inclusion, layer.projection, layer.retraction, layer.section)
        self.emit(ShortExact(k_nu, nu_id, q_nu, *mats), 1)
        self.emit(ShortExact(k_zero, zero_id, q_zero, *mats), -1)
        self.reduce_pair(k_nu, k_zero, depth + 1)
        self.reduce_pair(q_nu, q_zero, depth + 1)


def reduce_nil_generator(N: NilMulticomplex, strategy: str = MAX_INDEX):
    """Certificate that [N, ν] - [N, 0] = 0, or a ReductionFailure.

    Precondition: ``validate_nil(N)`` passes (ValueError otherwise).
    """
    if strategy not in (MAX_INDEX, MIN_INDEX):
        raise ValueError(f"unknown strategy {strategy!r}")
    report = validate_nil(N)
    if not report.passed:
        raise ValueError("reduce_nil_generator needs a valid Nil multicomplex:\n"
                         + report.summary())
    # each layer lowers the index of both halves, so depth never exceeds it
    b = _Builder(strategy, budget=max(1, nil_index(N).max_index))
    b.registry["F"] = N
    b.registry["F0"] = N.zero_partner()
    try:
        b.reduce_pair("F", "F0", 0)
    except _Abort as abort:
        return abort.failure
    claim = Claim(FormalSum.of(("F", 1), ("F0", -1)), tuple(b.coefficients))
    return Certificate(N.ring, dict(b.registry), ("F", "F0"), tuple(b.steps), claim)
