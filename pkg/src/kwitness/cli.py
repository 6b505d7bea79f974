"""Command-line front end.

Exit codes: 0 success, 1 a negative verdict (validation failure, reduction
failure, rejected certificate, failed self-test), 2 malformed input or flags.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import formats
from .filtration import STRATEGIES
from .formats import ParseError
from .nil import validate_nil
from .parallel import pmap, thread_count
from .reduction import ReductionFailure, reduce_nil_generator
from .sampling import generate_instance
from .selftest import SUITES, run_suite
from .verify import verify_certificate

MAX_DIMENSION = 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # raise instead of exiting so main owns every exit code
    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


def _positive(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


def _nonnegative(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {text!r}")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="kwitness", description="Certificates for nilpotent-endomorphism "
                "classes of binary multicomplexes over Z and Z_(p).")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("validate", help="check an instance file")
    v.add_argument("path")

    r = sub.add_parser("reduce", help="build a certificate for an instance")
    r.add_argument("path")
    r.add_argument("--strategy", choices=STRATEGIES, default=STRATEGIES[0])
    r.add_argument("--out", required=True,
                   help="certificate path; on failure the annotated instance is written here")

    c = sub.add_parser("verify", help="replay a certificate")
    c.add_argument("path")

    g = sub.add_parser("gen", help="write seeded random instances")
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--dim", type=_nonnegative, required=True)
    g.add_argument("--rank-bound", type=_positive, default=4)
    g.add_argument("--entry-bound", type=_positive, default=3)
    g.add_argument("--count", type=_positive, default=1)
    g.add_argument("--out", required=True, help="output directory")

    s = sub.add_parser("selftest", help="run a self-test suite")
    s.add_argument("--suite", choices=SUITES, required=True)
    s.add_argument("--seed", type=int, default=1)
    return p


def cmd_validate(args) -> int:
    N = formats.instance_from_json(formats.read_json_file(args.path))
    report = validate_nil(N)
    print(report.summary())
    return 0 if report.passed else 1


def cmd_reduce(args) -> int:
    N = formats.instance_from_json(formats.read_json_file(args.path))
    if N.dimension > MAX_DIMENSION:
        raise _UsageError(f"reduce supports dimension at most {MAX_DIMENSION}, got {N.dimension}")
    report = validate_nil(N)
    if not report.passed:
        print(report.summary(), file=sys.stderr)
        raise _UsageError("instance does not validate; nothing to reduce")
    result = reduce_nil_generator(N, args.strategy)
    if isinstance(result, ReductionFailure):
        formats.write_json_file(args.out, formats.failure_to_json(result))
        print("\n".join(result.describe()))
        print(f"failure report written to {args.out}")
        return 1
    formats.write_json_file(args.out, formats.certificate_to_json(result))
    print(f"certificate with {len(result.steps)} steps written to {args.out}")
    return 0


def cmd_verify(args) -> int:
    cert = formats.certificate_from_json(formats.read_json_file(args.path))
    verdict = verify_certificate(cert)
    print(verdict)
    return 0 if verdict.accepted else 1


def _gen_one(job):
    seed, k, dim, rank_bound, entry_bound = job
    N = generate_instance(seed, k, dim, rank_bound, entry_bound)
    return formats.dumps(formats.instance_to_json(N))


def cmd_gen(args) -> int:
    if args.dim > MAX_DIMENSION:
        raise _UsageError(f"gen supports --dim 0..{MAX_DIMENSION}, got {args.dim}")
    os.makedirs(args.out, exist_ok=True)
    jobs = [(args.seed, k, args.dim, args.rank_bound, args.entry_bound)
            for k in range(args.count)]
    for k, text in enumerate(pmap(_gen_one, jobs)):
        name = os.path.join(args.out, f"instance-s{args.seed}-d{args.dim}-{k:04d}.json")
        with open(name, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(name)
    return 0


def cmd_selftest(args) -> int:
    result = run_suite(args.suite, args.seed)
    print("\n".join(result.lines()))
    return 0 if result.passed else 1


COMMANDS = {"validate": cmd_validate, "reduce": cmd_reduce, "verify": cmd_verify,
            "gen": cmd_gen, "selftest": cmd_selftest}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        thread_count()
        return COMMANDS[args.command](args)
    except (_UsageError, ParseError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # keep the exit-code contract for unexpected faults
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
