"""Command-line front end.

Exit codes: 0 on success (and, for commands that need one, a quadric patch),
2 when the input is valid but the patch is not a non-degenerate quadric,
1 for input or configuration errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .analysis import MONOMIALS, coefficient_angle, fit_by_sampling, validate_residuals
from .errors import InvalidNet, QuadtriError, RankDeficient
from .implicitizer import QuadricReport, implicitize
from .patch import INDEX_ORDER, ControlNet
from .projective import DEFAULT_TOL

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NOT_QUADRIC = 2


class ParseError(ValueError):
    """The input is not a well-formed JSON patch document."""


class ValidationError(ValueError):
    """The document parsed but violates the patch schema."""


@dataclass(frozen=True)
class PatchDocument:
    net: Dict[str, Tuple[float, float, float]]
    weights: Dict[str, float]
    tol: Optional[float] = None

    def to_net(self) -> ControlNet:
        return ControlNet(self.net, self.weights)

    def to_dict(self) -> dict:
        out = {
            "net": {k: list(self.net[k]) for k in INDEX_ORDER},
            "weights": {k: self.weights[k] for k in INDEX_ORDER},
        }
        if self.tol is not None:
            out["tol"] = self.tol
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_dict())


def _number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(f"{path}: expected a number, got {value!r}")
    x = float(value)
    if not math.isfinite(x):
        raise ValidationError(f"{path}: must be finite")
    return x


def parse_patch(text: str) -> PatchDocument:
    """Parse and validate a JSON patch document.

    Raises:
        ParseError: malformed JSON or a non-object top level.
        ValidationError: missing or extra keys, non-numeric entries, zero
            weights, or a degenerate corner triangle. Messages name the key
            path, e.g. ``weights.110``.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError("top level must be a JSON object")

    for section in ("net", "weights"):
        if section not in doc:
            raise ValidationError(f"missing key: {section}")
        if not isinstance(doc[section], dict):
            raise ValidationError(f"{section}: expected an object keyed by 002..200")
    unknown = sorted(set(doc) - {"net", "weights", "tol"})
    if unknown:
        raise ValidationError(f"unknown top-level keys: {', '.join(unknown)}")

    net = {}
    weights = {}
    for section, target in (("net", net), ("weights", weights)):
        extra = sorted(set(doc[section]) - set(INDEX_ORDER))
        if extra:
            raise ValidationError(f"{section}.{extra[0]}: unknown index")
        for key in INDEX_ORDER:
            path = f"{section}.{key}"
            if key not in doc[section]:
                raise ValidationError(f"missing key: {path}")
            value = doc[section][key]
            if section == "net":
                if not isinstance(value, list) or len(value) != 3:
                    raise ValidationError(f"{path}: expected a list of three numbers")
                target[key] = tuple(_number(c, f"{path}[{i}]") for i, c in enumerate(value))
            else:
                w = _number(value, path)
                if w == 0.0:
                    raise ValidationError(f"{path}: zero weight")
                target[key] = w

    tol = None
    if "tol" in doc:
        tol = _number(doc["tol"], "tol")
        if tol <= 0:
            raise ValidationError("tol: must be positive")

    document = PatchDocument(net=net, weights=weights, tol=tol)
    try:
        document.to_net()
    except InvalidNet as exc:
        raise ValidationError(str(exc)) from exc
    return document


# -- output ------------------------------------------------------------------

def _fmt(x: float, digits: int) -> str:
    if not math.isfinite(x):
        return "null"
    s = f"{x:.{digits}g}"
    return "0" if s == "-0" else s


def dumps_fixed(obj, digits: int = 17) -> str:
    """JSON with every float printed to ``digits`` significant digits."""
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt(float(obj), digits)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        items = (f"{json.dumps(str(k))}: {dumps_fixed(v, digits)}" for k, v in obj.items())
        return "{" + ", ".join(items) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(dumps_fixed(v, digits) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def format_polynomial(coeffs: Sequence[float], digits: int = 6, tol: float = DEFAULT_TOL) -> str:
    """``x^2 + y^2 + z^2 - 1 = 0`` style rendering in the fixed monomial order."""
    c = np.asarray(coeffs, dtype=float)
    big = np.max(np.abs(c)) if c.size else 0.0
    terms: List[str] = []
    for value, mono in zip(c, MONOMIALS):
        if big == 0.0 or abs(value) <= tol * big:
            continue
        mag = abs(value)
        if mono == "1":
            body = _fmt(mag, digits)
        elif _fmt(mag, digits) == "1":
            body = mono
        else:
            body = f"{_fmt(mag, digits)}{mono}"
        if not terms:
            terms.append(body if value > 0 else f"-{body}")
        else:
            terms.append(f"{'+' if value > 0 else '-'} {body}")
    return (" ".join(terms) if terms else "0") + " = 0"


def report_dict(report: QuadricReport) -> dict:
    comp = report.compatibility
    out = {
        "is_quadric": comp.is_quadric,
        "s": report.S.coords.tolist(),
        "s_infinite": comp.s_is_infinite,
        "adjusted_weights": report.adjusted.as_list() if report.adjusted else None,
        "rho_sigma_tau": ([report.adjusted.rho, report.adjusted.sigma, report.adjusted.tau]
                          if report.adjusted else None),
        "residuals": {
            "on_conic": list(comp.on_conic_residuals),
            "compatibility": comp.compatibility_residual,
            "tangent_det": comp.tangent_determinant,
        },
        "pencil": report.pencil,
        "t_representatives": list(report.t_of_representatives) if report.t_of_representatives else None,
        "matrix": report.quadric.m.ravel().tolist() if report.quadric is not None else None,
        "coefficients": report.coefficients.array().tolist() if report.coefficients else None,
        "class": report.quadric_class.value if report.quadric_class else None,
        "tolerance_used": report.tolerance,
    }
    if report.coefficients is not None:
        out["polynomial"] = format_polynomial(report.coefficients, digits=17, tol=report.tolerance)
    return out


def _human_report(report: QuadricReport, full: bool) -> str:
    comp = report.compatibility
    f = lambda x: "n/a" if x is None else _fmt(x, 6)  # noqa: E731
    S = report.S
    s_text = (f"direction ({f(S.x)}, {f(S.y)}, {f(S.z)})" if S.is_infinite
              else f"({f(S.x / S.h)}, {f(S.y / S.h)}, {f(S.z / S.h)})")
    lines = [
        f"quadric: {'yes' if comp.is_quadric else 'no'}",
        f"S: {s_text}",
        "on-conic residuals: " + ", ".join(f(r) for r in comp.on_conic_residuals),
        f"compatibility residual: {f(comp.compatibility_residual)}",
        f"tangent determinant: {f(comp.tangent_determinant)}",
    ]
    if full and report.adjusted is not None:
        aw = report.adjusted
        lines.append("adjusted weights: " + " ".join(f(w) for w in aw.as_list()))
        lines.append(f"rho, sigma, tau: {f(aw.rho)}, {f(aw.sigma)}, {f(aw.tau)}")
        lines.append("pencil: " + " + ".join(f"{f(v)} {k}" for k, v in report.pencil.items()))
        lines.append(f"equation: {format_polynomial(report.coefficients, tol=report.tolerance)}")
        lines.append(f"class: {report.quadric_class.value}")
    return "\n".join(lines)


# -- commands -----------------------------------------------------------------

def _cmd_implicitize(net, tol, args):
    report = implicitize(net, tol=tol)
    code = EXIT_OK if report.is_quadric else EXIT_NOT_QUADRIC
    if args.json:
        return code, dumps_fixed(report_dict(report))
    if args.poly:
        if not report.is_quadric:
            return code, "not a non-degenerate quadric"
        return code, format_polynomial(report.coefficients, tol=tol)
    return code, _human_report(report, full=True)


def _cmd_check(net, tol, args):
    report = implicitize(net, tol=tol)
    code = EXIT_OK if report.is_quadric else EXIT_NOT_QUADRIC
    if args.json:
        full = report_dict(report)
        keep = ("is_quadric", "s", "s_infinite", "residuals", "tolerance_used")
        return code, dumps_fixed({k: full[k] for k in keep})
    return code, _human_report(report, full=False)


def _cmd_classify(net, tol, args):
    report = implicitize(net, tol=tol)
    if not report.is_quadric:
        text = "not_a_quadric"
        code = EXIT_NOT_QUADRIC
    else:
        text = report.quadric_class.value
        code = EXIT_OK
    if args.json:
        return code, dumps_fixed({"is_quadric": report.is_quadric, "class": text})
    return code, text


def _cmd_validate(net, tol, args):
    report = implicitize(net, tol=tol)
    if not report.is_quadric:
        return EXIT_NOT_QUADRIC, dumps_fixed({"is_quadric": False}) if args.json else "not a non-degenerate quadric"
    worst, samples = validate_residuals(net, report.quadric, args.grid, tol=tol)
    if args.json:
        return EXIT_OK, dumps_fixed({"grid": args.grid, "samples": samples, "max_residual": worst})
    return EXIT_OK, f"grid {args.grid}: {samples} samples, max normalized residual {_fmt(worst, 6)}"


def _cmd_fit(net, tol, args):
    try:
        fit = fit_by_sampling(net, args.points, tol=tol)
    except RankDeficient as exc:
        return EXIT_NOT_QUADRIC, dumps_fixed({"rank_deficient": True}) if args.json else f"rank deficient: {exc}"
    if args.json:
        return EXIT_OK, dumps_fixed({
            "points": fit.n_points,
            "coefficients": fit.coefficients.array().tolist(),
            "singular_ratio": fit.singular_ratio,
        })
    if args.poly:
        return EXIT_OK, format_polynomial(fit.coefficients, tol=tol)
    return EXIT_OK, (f"equation: {format_polynomial(fit.coefficients, tol=tol)}\n"
                     f"singular ratio: {_fmt(fit.singular_ratio, 6)}")


def _cmd_compare(net, tol, args):
    report = implicitize(net, tol=tol)
    if not report.is_quadric:
        return EXIT_NOT_QUADRIC, dumps_fixed({"is_quadric": False}) if args.json else "not a non-degenerate quadric"
    try:
        fit = fit_by_sampling(net, args.points, tol=tol)
    except RankDeficient as exc:
        return EXIT_ERROR, f"oracle failed: {exc}"
    angle = coefficient_angle(report.coefficients, fit.coefficients)
    if args.json:
        return EXIT_OK, dumps_fixed({
            "closed_form": report.coefficients.array().tolist(),
            "sampled": fit.coefficients.array().tolist(),
            "angle": angle,
        })
    return EXIT_OK, (f"closed form: {format_polynomial(report.coefficients, tol=tol)}\n"
                     f"sampled:     {format_polynomial(fit.coefficients, tol=tol)}\n"
                     f"angle: {_fmt(angle, 6)} rad")


COMMANDS = {
    "implicitize": _cmd_implicitize,
    "check": _cmd_check,
    "classify": _cmd_classify,
    "validate": _cmd_validate,
    "fit": _cmd_fit,
    "compare": _cmd_compare,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("patch", help="JSON patch document, or '-' for stdin")
    common.add_argument("--tol", type=float, default=None,
                        help=f"relative tolerance (default {DEFAULT_TOL:g})")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--poly", action="store_true", help="print only the implicit equation")

    parser = argparse.ArgumentParser(
        prog="quadtri",
        description="Implicit equations of quadric rational quadratic Bezier triangles.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("implicitize", parents=[common], help="full pipeline")
    sub.add_parser("check", parents=[common], help="quadric verdict and residuals")
    sub.add_parser("classify", parents=[common], help="quadric type")
    p = sub.add_parser("validate", parents=[common], help="residual sweep over the patch")
    p.add_argument("--grid", type=int, default=15)
    p = sub.add_parser("fit", parents=[common], help="least-squares fit on sampled points")
    p.add_argument("--points", type=int, default=25)
    p = sub.add_parser("compare", parents=[common], help="closed form vs sampled fit")
    p.add_argument("--points", type=int, default=25)
    return parser


def run(argv: Optional[Sequence[str]] = None, stdin=None) -> Tuple[int, str]:
    """Execute a command and return ``(exit_code, output_text)``."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return (EXIT_ERROR if exc.code else EXIT_OK), ""

    try:
        if args.patch == "-":
            text = (stdin or sys.stdin).read()
        else:
            with open(args.patch, encoding="utf-8") as fh:
                text = fh.read()
        doc = parse_patch(text)
    except OSError as exc:
        return EXIT_ERROR, f"error: cannot read {args.patch}: {exc.strerror or exc}"
    except (ParseError, ValidationError) as exc:
        return EXIT_ERROR, f"error: {exc}"

    tol = args.tol if args.tol is not None else (doc.tol if doc.tol is not None else DEFAULT_TOL)
    if not tol > 0:
        return EXIT_ERROR, "error: --tol must be positive"
    if getattr(args, "grid", 2) < 2:
        return EXIT_ERROR, "error: --grid must be at least 2"
    if getattr(args, "points", 10) < 10:
        return EXIT_ERROR, "error: --points must be at least 10"

    try:
        return COMMANDS[args.command](doc.to_net(), tol, args)
    except QuadtriError as exc:
        return EXIT_ERROR, f"error: {exc}"


def main(argv: Optional[Sequence[str]] = None) -> int:
    code, text = run(argv)
    if text:
        stream = sys.stderr if code == EXIT_ERROR else sys.stdout
        print(text, file=stream)
    return code


if __name__ == "__main__":
    sys.exit(main())
