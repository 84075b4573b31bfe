"""Command-line interface.

Subcommands: fit, sample, swap, assess, degrees, loglik.  Diagnostics go
to stderr; data goes to the file named by --out/--out-dir or to stdout.
Exit codes: 0 success, 1 usage error, 2 input/format error, 3 solver
stopped at max_iter, 4 infeasible constraints.  All behavior is
flag-driven (no environment variables) and all outputs are byte-stable
for identical inputs.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import formats
from .assessment import assess, report_to_json
from .degrees import DegreeSequenceSpec, ensure_even_total, generate_degrees
from .errors import InfeasibleError, InputFormatError
from .matrix import Structure, StructureKind, ValueDomain, compute_margins
from .model import load_model, model_to_json
from .sampling import sample_one
from .solver import STATUS_CONVERGED, SolverConfig, fit, trace_to_csv
from .swaps import ChainSpec, default_delta_mode, run_chain

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INPUT = 2
EXIT_NOT_CONVERGED = 3
EXIT_INFEASIBLE = 4


class UsageError(Exception):
    pass


class _CliParser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _structure(args) -> Structure:
    kind = StructureKind(args.structure)
    self_loops = getattr(args, "self_loops", "false") == "true"
    if kind is StructureKind.DATABASE and self_loops:
        raise UsageError("--self-loops applies to network structures only")
    return Structure(kind, self_loops if kind is not StructureKind.DATABASE else False)


def _load_matrix(args, domain: ValueDomain, structure: Structure):
    return formats.parse_matrix(
        formats.read_text(args.input), args.format, domain, structure
    )


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        formats.write_text(out, text)


def _cmd_fit(args) -> int:
    structure = _structure(args)
    domain = ValueDomain(args.domain)
    if (args.input is None) == (args.margins is None):
        raise UsageError("fit needs exactly one of --input or --margins")
    if args.input is not None:
        if args.format is None:
            raise UsageError("--input requires --format")
        targets = compute_margins(_load_matrix(args, domain, structure))
    else:
        targets = formats.parse_margins(formats.read_text(args.margins), structure)
    config = SolverConfig(
        method=args.solver, tol=args.tol, max_iter=args.max_iter,
        max_bins=args.max_bins,
    )
    model, trace = fit(targets, domain, structure, config)
    if args.trace is not None:
        formats.write_text(args.trace, trace_to_csv(trace))
    _emit(model_to_json(model) + "\n", args.out)
    if trace.status != STATUS_CONVERGED:
        last = trace.records[-1] if trace.records else None
        grad = last.grad_sq_norm if last else float("nan")
        print(
            f"fit stopped with status {trace.status} "
            f"(normalized squared gradient {grad:g})",
            file=sys.stderr,
        )
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def _default_format(model) -> str:
    if model.structure.is_network:
        return "edgelist"
    return "fimi" if model.domain is ValueDomain.BINARY else "csv"


def _cmd_sample(args) -> int:
    model = load_model(args.model)
    fmt = args.format or _default_format(model)
    ext = formats.matrix_extension(fmt)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for k in range(args.samples):
        matrix = sample_one(model, args.seed, k)
        formats.write_text(out_dir / f"sample_{k}.{ext}",
                           formats.format_matrix(matrix, fmt))
    print(f"wrote {args.samples} samples to {out_dir}", file=sys.stderr)
    return EXIT_OK


def _cmd_swap(args) -> int:
    structure = _structure(args)
    domain = ValueDomain(args.domain)
    data = _load_matrix(args, domain, structure)
    mode = args.delta_mode or default_delta_mode(domain)
    chain = ChainSpec(steps=args.steps, seed=args.seed, delta_mode=mode)
    result, stats = run_chain(data, chain)
    _emit(formats.format_matrix(result, args.format), args.out)
    print(
        f"chain of {args.steps} steps: {stats.accepted} accepted, "
        f"{stats.rejected} rejected",
        file=sys.stderr,
    )
    return EXIT_OK


def _cmd_assess(args) -> int:
    model = load_model(args.model)
    data = formats.parse_matrix(
        formats.read_text(args.input), args.format, model.domain, model.structure
    )
    report = assess(data, model, args.support, args.samples, args.seed)
    _emit(report_to_json(report) + "\n", args.out)
    return EXIT_OK


def _cmd_degrees(args) -> int:
    spec = DegreeSequenceSpec(
        n=args.n, exponent=args.exponent, seed=args.seed, d_max=args.d_max
    )
    d = generate_degrees(spec)
    if args.even:
        d = ensure_even_total(d, spec.seed)
    _emit("".join(f"{int(v)}\n" for v in d), args.out)
    return EXIT_OK


def _cmd_loglik(args) -> int:
    model = load_model(args.model)
    data = formats.parse_matrix(
        formats.read_text(args.input), args.format, model.domain, model.structure
    )
    sys.stdout.write(formats.format_float(model.log_prob(data)) + "\n")
    return EXIT_OK


def _add_io_flags(p, with_structure=True):
    p.add_argument("--input", help="data matrix file")
    p.add_argument("--format", choices=formats.FORMAT_NAMES, help="input file format")
    p.add_argument("--domain", required=True,
                   choices=[d.value for d in ValueDomain])
    if with_structure:
        p.add_argument("--structure", default="database",
                       choices=[k.value for k in StructureKind])
        p.add_argument("--self-loops", dest="self_loops", default="false",
                       choices=["true", "false"])


def build_parser() -> argparse.ArgumentParser:
    parser = _CliParser(prog="maxentnull",
                        description="maximum-entropy null models for matrices")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit a model to margins")
    _add_io_flags(p)
    p.add_argument("--margins", help="margins file instead of a data matrix")
    p.add_argument("--solver", default="newton", choices=["newton", "pgd"])
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--max-iter", dest="max_iter", type=int, default=1000)
    p.add_argument("--max-bins", dest="max_bins", type=int, default=None)
    p.add_argument("--trace", help="write per-iteration CSV trace here")
    p.add_argument("--out", help="model file (stdout when omitted)")
    p.set_defaults(run=_cmd_fit)

    p = sub.add_parser("sample", help="draw matrices from a fitted model")
    p.add_argument("--model", required=True)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=formats.FORMAT_NAMES)
    p.add_argument("--out-dir", dest="out_dir", required=True)
    p.set_defaults(run=_cmd_sample)

    p = sub.add_parser("swap", help="randomize preserving exact margins")
    _add_io_flags(p)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--delta-mode", dest="delta_mode",
                   choices=["unit", "integer", "real"])
    p.add_argument("--out", help="output matrix (stdout when omitted)")
    p.set_defaults(run=_cmd_swap)

    p = sub.add_parser("assess", help="closed-itemset counts vs model samples")
    p.add_argument("--input", required=True)
    p.add_argument("--format", default="fimi", choices=formats.FORMAT_NAMES)
    p.add_argument("--model", required=True)
    p.add_argument("--support", type=int, required=True)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="report file (stdout when omitted)")
    p.set_defaults(run=_cmd_assess)

    p = sub.add_parser("degrees", help="sample a power-law degree sequence")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--exponent", type=float, default=2.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--d-max", dest="d_max", type=int, default=None)
    p.add_argument("--even", action="store_true",
                   help="adjust to an even total degree")
    p.add_argument("--out", help="one degree per line (stdout when omitted)")
    p.set_defaults(run=_cmd_degrees)

    p = sub.add_parser("loglik", help="log-probability of data under a model")
    p.add_argument("--input", required=True)
    p.add_argument("--format", required=True, choices=formats.FORMAT_NAMES)
    p.add_argument("--model", required=True)
    p.set_defaults(run=_cmd_loglik)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.run(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (InputFormatError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
