"""Command-line front end.

One job per invocation: read a JSON job from --input (file or stdin), run the
corresponding library operation, and write a report envelope to --output.

Exit codes: 0 success, 2 invalid input, 3 budget exhausted before a complete
answer, 4 certificate verification failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction

from .dynamics import (
    acts_distally_on_subp,
    group_is_finite,
    invariant_rational_subspaces,
    is_distal_linear,
    is_ergodic,
    orbit,
)
from .families import (
    Budget,
    disjoint_hyperplane_orbits,
    non_expansivity_certificate,
)
from .intmat import matrix_order
from .metric import hausdorff_distance, isolation_radius_lower_bound
from .serialization import (
    FORMAT_VERSION,
    ParseError,
    TOOL_NAME,
    TOOL_VERSION,
    canonical_json,
    encode_distality_verdict,
    encode_family,
    encode_group_report,
    encode_invariant_subspaces,
    encode_isolation,
    encode_metric_estimate,
    encode_non_expansivity,
    encode_orbit_report,
    parse_certificate,
    parse_covector,
    parse_subtorus,
    parse_unimodular,
)
from .subtori import covector_to_hyperplane
from .verify import verify_certificate

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_INCONCLUSIVE = 3
EXIT_VERIFY_FAILED = 4

COMMANDS = (
    "classify",
    "orbit",
    "disjoint-family",
    "certify-nonexpansive",
    "distance",
    "isolation",
    "group-finite",
    "verify",
)


class Inconclusive(Exception):
    def __init__(self, payload):
        super().__init__("budget exhausted")
        self.payload = payload


class VerifyFailed(Exception):
    def __init__(self, payload):
        super().__init__("verification failed")
        self.payload = payload


def _budget(params: dict) -> Budget:
    b = Budget()
    if params.get("budget_norm") is not None:
        b = Budget(int(params["budget_norm"]), b.max_window, b.max_candidates)
    if params.get("budget_window") is not None:
        b = Budget(b.max_norm, int(params["budget_window"]), b.max_candidates)
    return b


def _resolution(params: dict) -> Fraction:
    raw = params.get("resolution")
    if raw is None:
        return Fraction(1, 100)
    try:
        return Fraction(raw) if not isinstance(raw, float) else Fraction(raw).limit_denominator(10**9)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad resolution {raw!r}") from exc


def run_job(job: dict) -> dict:
    """Execute a validated job and return the result payload."""
    if not isinstance(job, dict):
        raise ParseError("job must be a JSON object")
    command = job.get("command")
    if command not in COMMANDS:
        raise ParseError(f"unknown command {command!r}")
    params = job.get("parameters", {})
    if not isinstance(params, dict):
        raise ParseError("'parameters' must be an object")

    if command == "classify":
        t = parse_unimodular(job.get("matrix"))
        verdict = acts_distally_on_subp(t)
        order = matrix_order(t)
        return {
            "distal_on_subp": verdict.distal,
            "order": order if order is not None else "infinite",
            "ergodic": is_ergodic(t),
            "distal_linear": is_distal_linear(t),
            "witness": encode_distality_verdict(verdict)["witness_covector"],
            "invariant_rational_subspaces": encode_invariant_subspaces(
                invariant_rational_subspaces(t)
            ) if t.n >= 2 else None,
        }

    if command == "orbit":
        t = parse_unimodular(job.get("matrix"))
        if "covector" in job:
            h = covector_to_hyperplane(parse_covector(job["covector"]))
        elif "subtorus" in job:
            h = parse_subtorus(job["subtorus"])
        else:
            raise ParseError("orbit needs 'covector' or 'subtorus'")
        window = int(params.get("budget_window") or 16)
        return encode_orbit_report(orbit(t, h, window))

    if command == "disjoint-family":
        t = parse_unimodular(job.get("matrix"))
        k = int(params.get("count") or 10)
        cert = disjoint_hyperplane_orbits(t, k, _budget(params))
        payload = encode_family(cert)
        if not cert.complete:
            raise Inconclusive(payload)
        return payload

    if command == "certify-nonexpansive":
        t = parse_unimodular(job.get("matrix"))
        k = int(params.get("count") or 10)
        cert = non_expansivity_certificate(t, k, _budget(params))
        payload = encode_non_expansivity(cert)
        if not cert.complete:
            raise Inconclusive(payload)
        return payload

    if command == "distance":
        h1 = parse_subtorus(job.get("first"))
        h2 = parse_subtorus(job.get("second"))
        return encode_metric_estimate(hausdorff_distance(h1, h2, _resolution(params)))

    if command == "isolation":
        h = parse_subtorus(job.get("subtorus"))
        cap = int(params.get("budget_norm") or 5)
        report = isolation_radius_lower_bound(h, cap, _resolution(params))
        return encode_isolation(report)

    if command == "group-finite":
        matrices = job.get("matrices")
        if not isinstance(matrices, list) or not matrices:
            raise ParseError("group-finite needs a nonempty 'matrices' array")
        gens = [parse_unimodular(m) for m in matrices]
        cap = int(params.get("count") or 20000)
        report = group_is_finite(gens, cap)
        payload = encode_group_report(report)
        if report.status == "inconclusive":
            raise Inconclusive(payload)
        return payload

    if command == "verify":
        data = job.get("certificate", job)
        try:
            cert = parse_certificate(data)
        except ParseError:
            raise
        except Exception as exc:
            raise ParseError(f"malformed certificate: {exc}") from exc
        result = verify_certificate(cert)
        payload = {"ok": result.ok, "failures": list(result.failures)}
        if not result.ok:
            raise VerifyFailed(payload)
        return payload

    raise AssertionError("unreachable")


def _consumed(result: dict) -> dict | None:
    """Budget-consumption summary extracted from certificate payloads."""
    family = None
    if isinstance(result, dict):
        if result.get("kind") == "disjoint_family":
            family = result
        elif result.get("kind") == "non_expansivity":
            family = result.get("family")
    if not family:
        return None
    radii = [r["window_radius"] for r in family.get("orbit_reports", [])]
    norms = [max(abs(x) for x in m) for m in family.get("members", [])]
    return {
        "max_window_used": max(radii, default=0),
        "max_member_norm": max(norms, default=0),
        "members_found": len(family.get("members", [])),
    }


def _envelope(command: str, job: dict, result: dict, started: float, budget: Budget | None) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "tool": TOOL_NAME,
        "version": TOOL_VERSION,
        "command": command,
        "input": job,
        "result": result,
        "budget": {
            "max_norm": budget.max_norm,
            "max_window": budget.max_window,
            "max_candidates": budget.max_candidates,
        } if budget is not None else None,
        "budget_consumed": _consumed(result),
        "timing_seconds": round(time.time() - started, 6),
    }


def _read_input(path: str | None) -> dict:
    if path is None or path == "-":
        text = sys.stdin.read()
    else:
        with open(path) as fh:
            text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON input: {exc}") from exc


def _write_output(path: str | None, payload: dict) -> None:
    text = canonical_json(payload)
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tordyn",
        description="Exact dynamics of torus automorphisms on the space of subtori",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--input", default="-", help="input JSON file, or - for stdin")
        p.add_argument("--output", default="-", help="output JSON file, or - for stdout")
        p.add_argument("--budget-norm", type=int, default=None)
        p.add_argument("--budget-window", type=int, default=None)
        p.add_argument("--count", type=int, default=None)
        p.add_argument("--resolution", default=None)
        p.add_argument("--seed", type=int, default=None,
                       help="accepted for scripting symmetry; results are deterministic")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    started = time.time()
    try:
        job = _read_input(args.input)
    except (ParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if not isinstance(job, dict):
        print("error: job must be a JSON object", file=sys.stderr)
        return EXIT_INVALID
    job = dict(job)
    job["command"] = args.command
    params = dict(job.get("parameters", {}))
    for key in ("budget_norm", "budget_window", "count", "resolution", "seed"):
        value = getattr(args, key, None)
        if value is not None:
            params[key] = value
    job["parameters"] = params
    budget = _budget(params)
    try:
        result = run_job(job)
        status = EXIT_OK
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (ValueError, KeyError, TypeError, IndexError) as exc:
        print(f"error: invalid input ({exc})", file=sys.stderr)
        return EXIT_INVALID
    except Inconclusive as exc:
        result = exc.payload
        status = EXIT_INCONCLUSIVE
    except VerifyFailed as exc:
        result = exc.payload
        status = EXIT_VERIFY_FAILED
    _write_output(args.output, _envelope(args.command, job, result, started, budget))
    return status


if __name__ == "__main__":
    sys.exit(main())
