"""Command-line front end.

A thin client over the service layer: each verb builds the same request
model the HTTP endpoint takes and dispatches it in-process, or POSTs it
to a running service when --server is given.  Exit codes: 0 for decided
verdicts, 2 for Unknown, 1 for errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from typing import Optional

from .dehn import DehnConditionError
from .reports import canonical_json, write_report
from .service import handlers
from .service.schemas import (
    BudgetModel,
    CheckCancellationRequest,
    ConedBallRequest,
    CorpusRequest,
    DehnReduceRequest,
    DimBoundsRequest,
    OneEndedRequest,
    OperationResponse,
    SpectrumBracketRequest,
    SpectrumEquivRequest,
    SpectrumInput,
    SpectrumUnionRequest,
    TautSpectrumRequest,
    WordProblemRequest,
)
from .words import ParseError, SpecError

EXIT_DECIDED = 0
EXIT_ERROR = 1
EXIT_UNKNOWN = 2


def _read(path: str) -> str:
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _budget_from_args(args) -> BudgetModel:
    return BudgetModel(
        max_cells=args.max_cells,
        max_cosets=args.max_cosets,
        perm_degree=args.perm_degree,
        rewrite_slack=args.rewrite_slack,
        max_states=args.max_states,
        max_assignments=args.max_assignments,
    )


def _spectrum_arg(text: str) -> SpectrumInput:
    """set:5,7@14 for explicit sets, file:PATH for saved spectrum reports."""
    if text.startswith("set:"):
        body = text[4:]
        if "@" not in body:
            raise ParseError(f"spectrum set needs a horizon: {text!r} (set:5,7@14)")
        values_part, horizon = body.rsplit("@", 1)
        values = [int(v) for v in values_part.split(",") if v.strip()]
        return SpectrumInput(values=values, horizon=int(horizon))
    if text.startswith("file:"):
        payload = json.loads(_read(text[5:]))
        if "lengths" in payload:
            return SpectrumInput(record=payload)
        for record in payload.get("records", []):
            if "lengths" in record:
                return SpectrumInput(record=record)
        raise ParseError(f"no spectrum record found in {text[5:]!r}")
    raise ParseError(f"bad spectrum argument {text!r} (use set:... or file:...)")


_VERBS = {
    "check-cancellation": handlers.check_cancellation,
    "dehn-reduce": handlers.dehn_reduce,
    "word-problem": handlers.word_problem,
    "taut-spectrum": handlers.taut_spectrum,
    "spectrum-union": handlers.spectrum_union,
    "spectrum-bracket": handlers.spectrum_bracket,
    "spectrum-equiv": handlers.spectrum_equiv,
    "coned-ball": handlers.coned_ball_handler,
    "dim-bounds": handlers.dim_bounds,
    "one-ended": handlers.one_ended,
    "corpus": handlers.corpus,
}


def _dispatch(verb: str, request, server: Optional[str]) -> OperationResponse:
    if server is None:
        return _VERBS[verb](request)
    import httpx

    try:
        response = httpx.post(
            f"{server.rstrip('/')}/{verb}", json=request.model_dump(), timeout=600.0
        )
    except httpx.HTTPError as exc:
        raise SpecError(f"cannot reach service at {server}: {exc}") from exc
    if response.status_code != 200:
        try:
            detail = response.json().get("detail", response.text)
        except ValueError:
            detail = response.text
        raise SpecError(f"service error ({response.status_code}): {detail}")
    return OperationResponse(**response.json())


def _build_request(args):
    verb = args.command
    if verb == "check-cancellation":
        return CheckCancellationRequest(
            presentation=_read(args.presentation), lambda_value=args.lambda_value
        )
    if verb == "dehn-reduce":
        return DehnReduceRequest(
            presentation=_read(args.presentation), word=args.word,
            unsafe_override=args.unsafe_override,
        )
    if verb == "word-problem":
        return WordProblemRequest(
            presentation=_read(args.presentation), word=args.word,
            unsafe_override=args.unsafe_override,
        )
    if verb == "taut-spectrum":
        return TautSpectrumRequest(
            graph=args.graph,
            graph_text=_read(args.graph_file) if args.graph_file else None,
            presentation=_read(args.presentation) if args.presentation else None,
            radius=args.radius, horizon=args.horizon,
            budget=_budget_from_args(args), seed=args.seed,
        )
    if verb == "spectrum-union":
        return SpectrumUnionRequest(left=_spectrum_arg(args.left), right=_spectrum_arg(args.right))
    if verb == "spectrum-bracket":
        return SpectrumBracketRequest(
            length=args.length, direction=args.direction,
            presentation=_read(args.presentation) if args.presentation else None,
            ell0=args.ell0,
        )
    if verb == "spectrum-equiv":
        return SpectrumEquivRequest(
            left=_spectrum_arg(args.left), right=_spectrum_arg(args.right), k=args.k
        )
    if verb == "coned-ball":
        return ConedBallRequest(
            presentation=_read(args.presentation), radius=args.radius,
            lambda_value=args.lambda_value,
        )
    if verb == "dim-bounds":
        return DimBoundsRequest(profile=_read(args.profile))
    if verb == "one-ended":
        return OneEndedRequest(presentation=_read(args.presentation), profile=_read(args.profile))
    if verb == "corpus":
        only = [int(v) for v in args.only.split(",")] if args.only else None
        return CorpusRequest(seed=args.seed, only=only, budget=_budget_from_args(args))
    raise SpecError(f"unknown verb {verb}")


def _add_budget_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--max-cells", type=int, default=10, help="rewriting search cell budget")
    parser.add_argument("--max-cosets", type=int, default=200_000, help="coset enumeration budget")
    parser.add_argument("--perm-degree", type=int, default=6, help="max permutation degree")
    parser.add_argument("--rewrite-slack", type=int, default=1, help="allowed lengthening per move")
    parser.add_argument("--max-states", type=int, default=20_000, help="rewriting state budget")
    parser.add_argument("--max-assignments", type=int, default=200_000, help="perm search budget")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="smallcancel",
        description="Small cancellation workbench over free products",
    )
    parser.add_argument("--server", default=None,
                        help="base URL of a running service; default runs in-process")
    parser.add_argument("--report", default=None,
                        help="write the machine-readable report to this path")
    parser.add_argument("--with-timings", action="store_true", default=False,
                        help="include wall-clock timings (breaks byte-identical reports)")
    # the same flags parse after the subcommand too; SUPPRESS keeps the
    # subparser from clobbering values parsed before it
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--server", default=argparse.SUPPRESS)
    common.add_argument("--report", default=argparse.SUPPRESS)
    common.add_argument("--with-timings", action="store_true", default=argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_parser(name, **kwargs):
        return sub.add_parser(name, parents=[common], **kwargs)

    p = add_parser("check-cancellation", help="pieces, lambda*, metric condition, constants")
    p.add_argument("presentation")
    p.add_argument("--lambda", dest="lambda_value", default=None, help="exact rational like 1/7")

    p = add_parser("dehn-reduce", help="reduce a word to its cyclic fixed point")
    p.add_argument("presentation")
    p.add_argument("--word", required=True)
    p.add_argument("--unsafe-override", action="store_true")

    p = add_parser("word-problem", help="decide triviality in the quotient")
    p.add_argument("presentation")
    p.add_argument("--word", required=True)
    p.add_argument("--unsafe-override", action="store_true")

    p = add_parser("taut-spectrum", help="brute-force taut loop length spectrum")
    p.add_argument("--graph", help="cycle:N or path:N")
    p.add_argument("--graph-file", help="edge-list file")
    p.add_argument("--presentation", help="Cayley-graph mode on a presentation file")
    p.add_argument("--radius", type=int, default=2)
    p.add_argument("--horizon", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    _add_budget_flags(p)

    p = add_parser("spectrum-union", help="pointwise free-product union of two spectra")
    p.add_argument("--left", required=True, help="set:5,7@14 or file:report.json")
    p.add_argument("--right", required=True)

    p = add_parser("spectrum-bracket", help="partner window across the quotient map")
    p.add_argument("--length", type=int, required=True)
    p.add_argument("--direction", required=True,
                   choices=["quotient-to-factors", "factors-to-quotient"])
    p.add_argument("--presentation")
    p.add_argument("--ell0", type=int)

    p = add_parser("spectrum-equiv", help="k-relatedness of two spectra")
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)
    p.add_argument("--k", type=int, default=1)

    p = add_parser("coned-ball", help="coset-graph ball with relator cells")
    p.add_argument("presentation")
    p.add_argument("--radius", type=int, required=True)
    p.add_argument("--lambda", dest="lambda_value", default=None)

    p = add_parser("dim-bounds", help="dimension bounds from a profile file")
    p.add_argument("profile")

    p = add_parser("one-ended", help="one-endedness criteria")
    p.add_argument("presentation")
    p.add_argument("--profile", required=True, help="flags for the factors and (optionally) G")

    p = add_parser("corpus", help="run the reproduction corpus")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--only", help="comma-separated check numbers")
    _add_budget_flags(p)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8431)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "serve":
        import uvicorn

        from .service.app import app

        uvicorn.run(app, host=args.host, port=args.port)
        return EXIT_DECIDED
    try:
        request = _build_request(args)
        started = time.monotonic()
        response = _dispatch(args.command, request, args.server)
        elapsed = time.monotonic() - started
    except (ParseError, SpecError, DehnConditionError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    print(response.summary)
    report = dict(response.report)
    if args.with_timings:
        report["timings"] = {"wall_seconds": round(elapsed, 3)}
        print(f"elapsed: {elapsed:.3f}s")
    if args.report:
        write_report(args.report, report)
        print(f"report written to {args.report}")
    if response.status == "decided":
        return EXIT_DECIDED
    if response.status == "unknown":
        return EXIT_UNKNOWN
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
