"""Seeded self-test suites: round trips, oracle agreement, tamper resistance.

Each suite returns a SuiteResult; ``passed`` holds iff every required
assertion held.  ReductionFailures are counted and logged for the
dimension 1 and 2 suites but are not assertion failures there.
Per-instance work goes through ``pmap`` so KWITNESS_THREADS applies.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction

from . import formats, oracle
from .certificate import Certificate, ShortExact
from .complexes import (
    BinaryMulticomplex,
    check_line,
    conjugate,
    delta_embed,
    direct_sum,
    free_module,
    random_acyclic_binary,
    random_unimodular,
    tensor,
)
from .linalg import (
    hnf,
    invariant_factors,
    is_hnf,
    is_invertible,
    kernel_saturated,
    membership,
    rank,
    snf,
    split_saturated_inclusion,
)
from .matrix import Matrix
from .nil import NilMulticomplex, validate_nil
from .parallel import pmap
from .reduction import ReductionFailure, reduce_nil_generator
from .rings import INTEGERS, localized
from .sampling import commutant_nilpotent_sample, generate_instance, random_nilpotent
from .verify import verify_certificate

SUITES = ("nil0", "nil1", "nil2", "linalg", "oracle", "tamper")
NIL0_TIME_LIMIT = 10.0


@dataclass
class SuiteResult:
    suite: str
    passed: bool
    stats: dict
    log: list = field(default_factory=list)
    seconds: float = 0.0

    def lines(self) -> list[str]:
        out = [f"suite {self.suite}: {'PASS' if self.passed else 'FAIL'} ({self.seconds:.2f}s)"]
        out += [f"  {k}: {v}" for k, v in self.stats.items()]
        out += [f"  {line}" for line in self.log]
        return out


# -- shared round trip -------------------------------------------------------

def round_trip(N: NilMulticomplex) -> dict:
    """reduce -> verify -> independent summation; a small picklable summary."""
    result = reduce_nil_generator(N)
    if isinstance(result, ReductionFailure):
        artifact = formats.dumps(formats.failure_to_json(result))
        reparsed = formats.instance_from_json(formats.loads(artifact))
        return {"status": "failure",
                "artifact_valid": validate_nil(reparsed).passed,
                "diagnostics": len(result.split_failure.failures),
                "summary": result.describe()}
    verdict = verify_certificate(result)
    return {"status": "accepted" if verdict.accepted else "rejected",
            "verdict": str(verdict),
            "sum_matches": oracle.step_sum(result) == dict(result.claim.target.terms),
            "steps": len(result.steps)}


def _tally(outcomes) -> dict:
    stats = {"instances": len(outcomes), "accepted": 0, "rejected": 0, "failures": 0,
             "sum_discrepancies": 0}
    for o in outcomes:
        if o["status"] == "failure":
            stats["failures"] += 1
            continue
        stats[o["status"]] += 1
        if o["status"] == "accepted" and not o["sum_matches"]:
            stats["sum_discrepancies"] += 1
    return stats


# -- Nil0 ----------------------------------------------------------------------

def _nil0_instance(args):
    seed, prime, i = args
    ring = INTEGERS if prime is None else localized(prime)
    rng = random.Random(f"nil0:{seed}:{prime}:{i}")
    r = rng.randint(1, 6)
    nu = random_nilpotent(rng, ring, r, entry_bound=9)
    return NilMulticomplex.build(free_module(ring, r), {(): nu})


def _nil0_case(args):
    return round_trip(_nil0_instance(args))


def nil0_integers(seed: int, count: int = 200) -> SuiteResult:
    start = time.perf_counter()
    outcomes = pmap(_nil0_case, [(seed, None, i) for i in range(count)])
    elapsed = time.perf_counter() - start
    stats = _tally(outcomes)
    stats["time_limit_s"] = NIL0_TIME_LIMIT
    ok = (stats["accepted"] == count and stats["sum_discrepancies"] == 0
          and elapsed < NIL0_TIME_LIMIT)
    return SuiteResult("nil0[Z]", ok, stats, seconds=elapsed)


def nil0_localized(seed: int, primes=(2, 3, 5), count: int = 100) -> SuiteResult:
    start = time.perf_counter()
    stats, ok = {}, True
    for p in primes:
        outcomes = pmap(_nil0_case, [(seed, p, i) for i in range(count)])
        t = _tally(outcomes)
        stats[f"Z_({p})"] = f"{t['accepted']}/{count} accepted"
        ok = ok and t["accepted"] == count and t["sum_discrepancies"] == 0
    return SuiteResult("nil0[Z_(p)]", ok, stats, seconds=time.perf_counter() - start)


def suite_nil0(seed: int) -> SuiteResult:
    a = nil0_integers(seed)
    b = nil0_localized(seed)
    stats = {f"Z {k}": v for k, v in a.stats.items()}
    stats["Z seconds"] = round(a.seconds, 2)
    stats.update(b.stats)
    return SuiteResult("nil0", a.passed and b.passed, stats, seconds=a.seconds + b.seconds)


# -- Nil1 ----------------------------------------------------------------------

def _gen_case(args):
    seed, index, dim, rank_bound = args
    return round_trip(generate_instance(seed, index, dim, rank_bound))


def _soundness_suite(name, outcomes, elapsed, labels=None) -> SuiteResult:
    stats = _tally(outcomes)
    log = []
    bad_artifacts = 0
    for k, o in enumerate(outcomes):
        label = f"instance {k}" if labels is None else labels[k]
        if o["status"] == "failure":
            if not (o["artifact_valid"] and o["diagnostics"]):
                bad_artifacts += 1
            log.append(f"{label}: {o['summary'][0]}")
        elif o["status"] == "rejected":
            log.append(f"{label}: emitted certificate rejected: {o['verdict']}")
    stats["incomplete_failure_artifacts"] = bad_artifacts
    ok = stats["rejected"] == 0 and stats["sum_discrepancies"] == 0 and bad_artifacts == 0
    return SuiteResult(name, ok, stats, log, elapsed)


def suite_nil1(seed: int, count: int = 100, rank_bound: int = 4) -> SuiteResult:
    start = time.perf_counter()
    outcomes = pmap(_gen_case, [(seed, k, 1, rank_bound) for k in range(count)])
    return _soundness_suite("nil1", outcomes, time.perf_counter() - start)


# -- Nil2 ----------------------------------------------------------------------

def curated_nets(seed: int, salt: int = 0) -> list[tuple[str, BinaryMulticomplex]]:
    """Two-directional complexes assembled from delta_embed, direct_sum and tensor.

    ``salt`` re-draws the random pieces while keeping each recipe.
    """
    ring = INTEGERS

    def line(s, size, bound=2):
        return random_acyclic_binary(f"net:{seed}:{salt}:{s}", 1, size, bound)

    def grid(s, rank_bound=4):
        return random_acyclic_binary(f"net:{seed}:{salt}:{s}", 2, rank_bound, 2)

    def twist(C, s):
        rng = random.Random(f"net-twist:{seed}:{salt}:{s}")
        g, gi = {}, {}
        for x in C.ranks:
            g[x], gi[x] = random_unimodular(rng, ring, C.rank(x), 2)
        return conjugate(C, g, gi)

    return [
        ("delta1(grid)", delta_embed(grid(0), 1)),
        ("delta2(grid)", delta_embed(grid(1), 2)),
        ("delta1(line x line)", delta_embed(tensor(line(2, 2), line(3, 2)), 1)),
        ("delta2(line x line)", delta_embed(tensor(line(4, 2), line(5, 2)), 2)),
        ("delta1(grid) + grid", direct_sum(delta_embed(grid(6, 3), 1), grid(7, 3))),
        ("delta1(grid) + delta2(grid)",
         direct_sum(delta_embed(grid(8, 2), 1), delta_embed(grid(9, 2), 2))),
        ("line x delta1(line)", tensor(line(10, 2), delta_embed(line(11, 2), 1))),
        ("delta1(line) x line", tensor(delta_embed(line(12, 2), 1), line(13, 2))),
        ("twist(delta1(line) x delta1(line))",
         twist(tensor(delta_embed(line(14, 2), 1), delta_embed(line(15, 1), 1)), 15)),
        ("twist(delta2(grid) + delta2(grid))",
         twist(direct_sum(delta_embed(grid(16, 2), 2), delta_embed(grid(17, 2), 2)), 17)),
        ("grid + twist(delta1(grid))",
         direct_sum(grid(18, 2), twist(delta_embed(grid(19, 2), 1), 19))),
        ("delta1(delta2(grid))", delta_embed(delta_embed(grid(20), 2), 1)),
    ]


def nil2_instances(seed: int, trials: int = 12, attempts: int = 4) -> list:
    """One Nil object per curated recipe, preferring a nonzero sampled ν."""
    chosen = {}
    for salt in range(attempts):
        for k, (name, C) in enumerate(curated_nets(seed, salt)):
            if k in chosen and not chosen[k][1].is_zero_endomorphism():
                continue
            found = commutant_nilpotent_sample(C, f"net-nu:{seed}:{salt}:{k}", trials)
            rng = random.Random(f"net-pick:{seed}:{salt}:{k}")
            chosen[k] = (name, rng.choice(found[1:]) if len(found) > 1 else found[0])
        if all(not N.is_zero_endomorphism() for _, N in chosen.values()):
            break
    return [chosen[k] for k in sorted(chosen)]


def _nil2_case(item):
    return round_trip(item[1])


def suite_nil2(seed: int) -> SuiteResult:
    start = time.perf_counter()
    items = nil2_instances(seed)
    outcomes = pmap(_nil2_case, items)
    res = _soundness_suite("nil2", outcomes, time.perf_counter() - start,
                           [name for name, _ in items])
    res.stats["nonzero_nu"] = sum(not N.is_zero_endomorphism() for _, N in items)
    res.passed = res.passed and len(items) >= 10
    return res


# -- exact linear algebra ------------------------------------------------------

def _random_matrix(rng, ring, rows, cols, bound):
    def entry():
        a = rng.randint(-bound, bound)
        if ring.localized and a and rng.random() < 0.3:
            d = rng.choice([u for u in (1, 2, 3, 4, 5, 7) if u % ring.prime])
            return Fraction(a, d)
        return a
    return Matrix(ring, [[entry() for _ in range(cols)] for _ in range(rows)], rows, cols)


def _is_snf(D, ring) -> bool:
    k = min(D.rows, D.cols)
    for i in range(D.rows):
        for j in range(D.cols):
            if i != j and D[i, j] != 0:
                return False
    diag = [D[i, i] for i in range(k)]
    for a, b in zip(diag, diag[1:]):
        if a == 0 and b != 0:
            return False
        if a != 0 and not ring.divides(a, b):
            return False
    return all(a == ring.normalize(a) for a in diag)


def _linalg_case(args) -> list[str]:
    seed, i = args
    rng = random.Random(f"linalg:{seed}:{i}")
    ring = INTEGERS if i % 2 == 0 else localized(rng.choice((2, 3, 5)))
    rows, cols = rng.randint(0, 6), rng.randint(0, 6)
    M = _random_matrix(rng, ring, rows, cols, rng.choice((1, 3, 9)))
    if rows >= 2 and rng.random() < 0.3:
        # force a dependent row
        r = [a + b for a, b in zip(M.row(0), M.row(1))]
        M = Matrix(ring, [list(M.row(k)) for k in range(rows - 1)] + [r], rows, cols)
    bad = []
    H, U = hnf(M)
    if H != U @ M or not is_invertible(U) or not is_hnf(H):
        bad.append("hnf postcondition")
    W, _ = random_unimodular(rng, ring, rows, 2)
    if hnf(W @ M)[0] != H:
        bad.append("hnf not canonical")
    D, P, Q = snf(M)
    if D != P @ M @ Q or not is_invertible(P) or not is_invertible(Q) or not _is_snf(D, ring):
        bad.append("snf postcondition")
    r = rank(M)
    K = kernel_saturated(M)
    if not (M @ K.basis).is_zero() or K.rank + r != cols or not K.is_saturated():
        bad.append("kernel postcondition")
    if K.rank:
        ret, comp = split_saturated_inclusion(K)
        if not (ret @ K.basis).is_identity() or not is_invertible(K.basis.hstack(comp)):
            bad.append("splitting postcondition")
        v = K.basis @ _random_matrix(rng, ring, K.rank, 1, 3)
        ok, coords = membership(list(v.column(0)), K)
        if not ok or K.basis @ Matrix(ring, [[c] for c in coords], K.rank, 1) != v:
            bad.append("membership postcondition")
    if not ring.localized and M.rows and M.cols:
        # ring coherence: Z_(p) invariant factors are the p-parts of the Z ones
        p = rng.choice((2, 3, 5))
        Zp = localized(p)
        expected = [Zp.normalize(d) for d in invariant_factors(M)]
        if invariant_factors(Matrix(Zp, M.data, M.rows, M.cols)) != expected:
            bad.append("ring coherence")
    return [f"instance {i} ({ring}, {rows}x{cols}): {b}" for b in bad]


def suite_linalg(seed: int, count: int = 1000) -> SuiteResult:
    start = time.perf_counter()
    failures = [msg for msgs in pmap(_linalg_case, [(seed, i) for i in range(count)])
                for msg in msgs]
    stats = {"instances": count, "failed_replays": len(failures)}
    return SuiteResult("linalg", not failures, stats, failures[:20],
                       time.perf_counter() - start)


# -- acyclicity oracle ---------------------------------------------------------

def random_line(rng) -> tuple:
    """A three-term line (a, b, ring), biased so that both verdicts are common."""
    ring = INTEGERS if rng.random() < 0.7 else localized(rng.choice((2, 3, 5)))
    r2, r1, r0 = rng.randint(0, 3), rng.randint(0, 4), rng.randint(0, 3)
    mode = rng.randrange(3)
    if mode == 0:
        a = _random_matrix(rng, ring, r1, r2, 2)
        b = _random_matrix(rng, ring, r0, r1, 2)
        return a, b, ring
    if mode == 1:
        # a spans (a multiple of) the kernel of b
        b = _random_matrix(rng, ring, r0, r1, rng.choice((1, 2)))
        K = kernel_saturated(b).basis
        T = _random_matrix(rng, ring, K.cols, K.cols, 1)
        if rng.random() < 0.5:
            T = random_unimodular(rng, ring, K.cols, 2)[0]
        return K @ T, b, ring
    # an elementary acyclic line in random bases, sometimes perturbed
    s = rng.randint(0, 3)
    t = rng.randint(0, 3)
    I = Matrix.identity
    a = I(ring, s).vstack(Matrix.zeros(ring, t, s))
    b = Matrix.zeros(ring, t, s).hstack(I(ring, t))
    g, gi = random_unimodular(rng, ring, s + t, 2)
    h, hi = random_unimodular(rng, ring, t, 2)
    a, b = g @ a, h @ b @ gi
    if rng.random() < 0.5 and a.rows and a.cols:
        i, j = rng.randrange(a.rows), rng.randrange(a.cols)
        scale = rng.choice((2, 3, -1))
        a = a.with_entry(i, j, a[i, j] * scale)
    return a, b, ring


def _oracle_case(args):
    seed, i = args
    a, b, ring = random_line(random.Random(f"oracle:{seed}:{i}"))
    failures, _ = check_line(a, b)
    mine = not failures
    ref = oracle.line_is_exact(a, b, ring)
    return mine, ref


def suite_oracle(seed: int, count: int = 500) -> SuiteResult:
    start = time.perf_counter()
    outcomes = pmap(_oracle_case, [(seed, i) for i in range(count)])
    agree = sum(m == r for m, r in outcomes)
    stats = {"lines": count, "agreement": f"{agree}/{count}",
             "exact": sum(r for _, r in outcomes),
             "not_exact": sum(not r for _, r in outcomes)}
    log = [f"line {i}: validate={m} oracle={r}" for i, (m, r) in enumerate(outcomes) if m != r]
    return SuiteResult("oracle", agree == count, stats, log, time.perf_counter() - start)


# -- tamper resistance ---------------------------------------------------------

def tamper_pool(seed: int, size: int = 6) -> list[Certificate]:
    """Accepted certificates with a nonzero endomorphism, small enough to replay."""
    pool, k = [], 0
    while len(pool) < size and k < 50 * size:
        dim = (0, 1, 1, 2)[k % 4]
        N = generate_instance(f"tamper:{seed}", k, dim, 3)
        k += 1
        if N.is_zero_endomorphism():
            continue
        cert = reduce_nil_generator(N)
        if isinstance(cert, Certificate) and verify_certificate(cert).accepted:
            pool.append(cert)
    return pool


def _matrix_slots(cert: Certificate) -> list:
    """(path, matrix) for every matrix with an entry, in a fixed order."""
    slots = []
    for key in sorted(cert.registry):
        N = cert.registry[key]
        for i in range(1, N.dimension + 1):
            for tilde in (False, True):
                for x, m in sorted(N.base.maps(i, tilde).items()):
                    slots.append((("object", key, "d", i, tilde, x), m))
        for x, m in sorted(N.nil.items()):
            slots.append((("object", key, "nil", x), m))
    for s, step in enumerate(cert.steps):
        for fld in ("inclusion", "projection", "retraction", "section", "maps"):
            maps = getattr(step, fld, None)
            if maps is None:
                continue
            for x, m in sorted(maps.items()):
                slots.append((("step", s, fld, x), m))
    return [(p, m) for p, m in slots if m.rows and m.cols]


def mutate(cert: Certificate, path, i: int, j: int) -> Certificate:
    """Copy of cert with entry (i, j) of the addressed matrix incremented by one."""
    def bump(m):
        return m.with_entry(i, j, m[i, j] + 1)

    if path[0] == "object":
        key = path[1]
        N = cert.registry[key]
        if path[2] == "nil":
            nil = dict(N.nil)
            nil[path[3]] = bump(nil[path[3]])
            new = NilMulticomplex(N.base, nil)
        else:
            _, _, _, d, tilde, x = path
            pairs = [list(p) for p in N.base.differentials]
            maps = dict(pairs[d - 1][tilde])
            maps[x] = bump(maps[x])
            pairs[d - 1][tilde] = maps
            base = BinaryMulticomplex(N.ring, N.dimension, dict(N.base.ranks),
                                      tuple(tuple(p) for p in pairs))
            new = NilMulticomplex(base, N.nil)
        registry = dict(cert.registry)
        registry[key] = new
        return Certificate(cert.ring, registry, cert.target_pair, cert.steps, cert.claim)
    _, s, fld, x = path
    step = cert.steps[s]
    maps = dict(getattr(step, fld))
    maps[x] = bump(maps[x])
    if isinstance(step, ShortExact):
        new_step = ShortExact(**{**step.__dict__, fld: maps})
    else:
        new_step = type(step)(step.left, step.right, maps)
    steps = list(cert.steps)
    steps[s] = new_step
    return Certificate(cert.ring, cert.registry, cert.target_pair, tuple(steps), cert.claim)


def _tamper_case(args):
    seed, k, pool = args
    rng = random.Random(f"tamper-mut:{seed}:{k}")
    cert = pool[k % len(pool)]
    path, m = rng.choice(_matrix_slots(cert))
    i, j = rng.randrange(m.rows), rng.randrange(m.cols)
    bad = mutate(cert, path, i, j)
    accepted = verify_certificate(bad).accepted
    valid = oracle.certificate_ok(bad)
    return accepted, valid, path[0] + ":" + str(path[2])


def suite_tamper(seed: int, count: int = 100) -> SuiteResult:
    start = time.perf_counter()
    pool = tamper_pool(seed)
    if not pool:
        return SuiteResult("tamper", False, {"pool": 0}, ["no accepted certificates to mutate"],
                           time.perf_counter() - start)
    outcomes = pmap(_tamper_case, [(seed, k, pool) for k in range(count)])
    breaking = [o for o in outcomes if not o[1]]
    accepted_breaking = sum(1 for o in breaking if o[0])
    benign = [o for o in outcomes if o[1]]
    benign_rejected = sum(1 for o in benign if not o[0])
    stats = {"pool": len(pool), "mutations": count,
             "identity_changing": len(breaking),
             "identity_changing_accepted": accepted_breaking,
             "identity_preserving": len(benign),
             "identity_preserving_rejected": benign_rejected}
    ok = accepted_breaking == 0 and benign_rejected == 0
    return SuiteResult("tamper", ok, stats, seconds=time.perf_counter() - start)


RUNNERS = {"nil0": suite_nil0, "nil1": suite_nil1, "nil2": suite_nil2,
           "linalg": suite_linalg, "oracle": suite_oracle, "tamper": suite_tamper}


def run_suite(name: str, seed: int) -> SuiteResult:
    return RUNNERS[name](seed)
