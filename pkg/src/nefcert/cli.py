"""Command-line front end with deterministic file outputs.

Subcommands:
  check     certify one divisor and emit its certificate
  facets    print the facet table of a genus
  rays      enumerate extremal rays (cached, with a CSV mirror)
  verify    certify every ray of a genus and emit a report
  expand    print the c-average coefficient table of a restriction
  validate  re-check a certificate file against a divisor

Divisor spec strings look like "6;25/3;5/6,5/3,5/3,0" (genus; lambda
coefficient; b_0,...,b_{g//2}).  Exit codes: 0 success/certified,
1 inconclusive, 2 invalid input, 64 usage.  All emitted files are
byte-deterministic for fixed inputs and config; timing is reported on
stdout and in a separate meta file only.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
import time
from fractions import Fraction
from pathlib import Path

from nefcert import __version__
from nefcert.averages import c_average, parse_kinds
from nefcert.cone_enum import (
    extremal_rays,
    facet_matrix,
    verify_genus,
)
from nefcert.divisor_algebra import (
    DomainError,
    Profile,
    SymDivisorMg,
    format_rational,
    parse_rational,
)
from nefcert.nef_engine import (
    EngineConfig,
    NotFDivisorError,
    certificate_from_dict,
    certificate_to_dict,
    validate_certificate,
)
from nefcert.pullback import restrict

CACHE_ENV_VAR = "NEFCERT_CACHE_DIR"
DEFAULT_CACHE_DIR = ".nefcert-cache"

EXIT_OK = 0
EXIT_INCONCLUSIVE = 1
EXIT_INVALID = 2
EXIT_USAGE = 64


class ParseError(ValueError):
    pass


def parse_divisor(text: str) -> SymDivisorMg:
    """Parse "g;a;b_0,b_1,..." with rational tokens."""
    parts = text.strip().split(";")
    if len(parts) != 3:
        raise ParseError(f"expected 'g;a;b_0,...', got {text!r}")
    g_text, a_text, b_text = parts
    try:
        g = int(g_text)
    except ValueError as exc:
        raise ParseError(f"malformed genus token {g_text!r}") from exc
    if g < 2:
        raise ParseError(f"genus must be >= 2, got {g}")
    try:
        a = parse_rational(a_text)
    except DomainError as exc:
        raise ParseError(str(exc)) from exc
    tokens = b_text.split(",")
    expected = g // 2 + 1
    if len(tokens) != expected:
        raise ParseError(f"expected {expected} coefficients, got {len(tokens)}")
    coeffs = []
    for token in tokens:
        try:
            coeffs.append(parse_rational(token))
        except DomainError as exc:
            raise ParseError(str(exc)) from exc
    return SymDivisorMg(g, a, tuple(coeffs))


def canonical_json(data) -> str:
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def content_digest(data) -> str:
    return hashlib.sha256(
        json.dumps(data, sort_keys=True, separators=(",", ":")).encode()
    ).hexdigest()


def _write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def _emit(text: str, output: str | None) -> None:
    if output:
        _write_atomic(Path(output), text)
    else:
        sys.stdout.write(text)


def _load_config(path: str | None) -> EngineConfig:
    if path is None:
        return EngineConfig()
    with open(path, encoding="utf-8") as fh:
        return EngineConfig.from_dict(json.load(fh))


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # noqa: D102 - argparse hook
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        sys.exit(EXIT_USAGE)


# -- subcommands -------------------------------------------------------------


def cmd_check(args) -> int:
    try:
        divisor = parse_divisor(args.divisor)
        config = _load_config(args.config)
    except (ParseError, DomainError, OSError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"invalid input: {exc}\n")
        return EXIT_INVALID
    try:
        from nefcert.nef_engine import certify_nef

        cert = certify_nef(divisor, config)
    except NotFDivisorError as exc:
        _emit(
            canonical_json(
                {
                    "status": "rejected",
                    "violations": [
                        {
                            "family": v.family,
                            "indices": list(v.indices),
                            "value": format_rational(v.value),
                        }
                        for v in exc.violations
                    ],
                }
            ),
            args.output,
        )
        return EXIT_INVALID
    cert_dict = certificate_to_dict(cert)
    document = {
        "certificate": cert_dict,
        "report": {
            "command": "check",
            "divisor": divisor.spec_string(),
            "input_digest": content_digest(divisor.spec_string()),
            "tool_version": __version__,
            "status": "certified" if cert.is_conclusive() else "inconclusive",
            "closer": cert.closer(),
            "node_count": cert.node_count(),
        },
    }
    _emit(canonical_json(document), args.output)
    return EXIT_OK if cert.is_conclusive() else EXIT_INCONCLUSIVE


def cmd_facets(args) -> int:
    try:
        m = facet_matrix(args.genus)
    except DomainError as exc:
        sys.stderr.write(f"invalid input: {exc}\n")
        return EXIT_INVALID
    document = {
        "genus": m.genus,
        "columns": [f"e_{i}" for i in range(2, m.genus // 2 + 1)],
        "rows": [
            {"partition": list(p.parts), "coefficients": list(row)}
            for p, row in zip(m.partitions, m.rows)
        ],
        "tool_version": __version__,
    }
    _emit(canonical_json(document), args.output)
    return EXIT_OK


def _ray_documents(g: int) -> tuple[str, str]:
    rays = extremal_rays(facet_matrix(g))
    json_text = canonical_json(
        {"genus": g, "basis": "B", "rays": [list(r) for r in rays.integer_rays()]}
    )
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([f"e_{i}" for i in range(2, g // 2 + 1)])
    for ray in rays.integer_rays():
        writer.writerow(list(ray))
    return json_text, buf.getvalue()


def _cache_dir(args) -> Path:
    if args.cache:
        return Path(args.cache)
    return Path(os.environ.get(CACHE_ENV_VAR, DEFAULT_CACHE_DIR))


def cmd_rays(args) -> int:
    g = args.genus
    if g < 4:
        sys.stderr.write(f"invalid input: rays need genus >= 4, got {g}\n")
        return EXIT_INVALID
    json_text: str | None = None
    csv_text: str | None = None
    cache_json = _cache_dir(args) / f"rays_g{g}.json"
    cache_csv = _cache_dir(args) / f"rays_g{g}.csv"
    if not args.no_cache and cache_json.exists() and cache_csv.exists():
        json_text = cache_json.read_text(encoding="utf-8")
        csv_text = cache_csv.read_text(encoding="utf-8")
    if json_text is None or csv_text is None:
        json_text, csv_text = _ray_documents(g)
        if not args.no_cache:
            _write_atomic(cache_json, json_text)
            _write_atomic(cache_csv, csv_text)
    if args.output:
        _write_atomic(Path(args.output), json_text)
        _write_atomic(Path(args.output).with_suffix(".csv"), csv_text)
    else:
        sys.stdout.write(json_text)
    return EXIT_OK


def cmd_verify(args) -> int:
    g = args.genus
    try:
        config = _load_config(args.config)
    except (DomainError, OSError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"invalid input: {exc}\n")
        return EXIT_INVALID
    if g < 4:
        sys.stderr.write(f"invalid input: verify needs genus >= 4, got {g}\n")
        return EXIT_INVALID
    started = time.monotonic()
    report = verify_genus(g, config, jobs=args.jobs)
    elapsed = time.monotonic() - started
    out_dir = Path(args.output_dir or f"verify_g{g}")
    per_ray = [
        {
            "ray": list(o.ray),
            "outcome": o.outcome,
            "closer": o.closer,
            "node_count": o.node_count,
        }
        for o in report.outcomes
    ]
    content = {
        "genus": g,
        "tool_version": __version__,
        "config": config.to_dict(),
        "rays_total": len(report.outcomes),
        "counts": report.counts(),
        "per_ray": per_ray,
        "all_certified": report.all_certified,
    }
    content["digest"] = content_digest(per_ray)
    _write_atomic(out_dir / "report.json", canonical_json(content))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["ray", "outcome", "closer", "node_count"])
    for o in report.outcomes:
        closer = o.closer.get("type", "")
        if closer == "criterion":
            closer = f"criterion:{o.closer['name']}"
        elif closer == "recursion":
            closer = f"depth:{o.closer['depth']}"
        writer.writerow([" ".join(map(str, o.ray)), o.outcome, closer, o.node_count])
    _write_atomic(out_dir / "report.csv", buf.getvalue())
    for index, outcome in enumerate(report.outcomes):
        if outcome.certificate is not None:
            _write_atomic(
                out_dir / "certificates" / f"ray_{index:04d}.json",
                canonical_json(certificate_to_dict(outcome.certificate)),
            )
    _write_atomic(
        out_dir / "meta.json",
        canonical_json({"elapsed_seconds": round(elapsed, 3), "jobs": args.jobs}),
    )
    counts = report.counts()
    sys.stdout.write(
        f"genus {g}: {len(report.outcomes)} rays, {counts['certified']} certified, "
        f"{counts['inconclusive']} inconclusive, {counts['error']} errors "
        f"({elapsed:.1f}s)\n"
    )
    return EXIT_OK if report.all_certified else EXIT_INCONCLUSIVE


def cmd_expand(args) -> int:
    try:
        divisor = parse_divisor(args.divisor)
        profile = Profile.parse(args.profile)
        kinds = parse_kinds(args.kinds)
        c = parse_rational(args.c)
        if profile.genus != divisor.genus:
            raise DomainError(
                f"profile genus {profile.genus} does not match divisor genus "
                f"{divisor.genus}"
            )
        avg = c_average(restrict(divisor.b_vector(), profile), c, kinds)
    except (ParseError, DomainError) as exc:
        sys.stderr.write(f"invalid input: {exc}\n")
        return EXIT_INVALID
    document = {
        "profile": list(profile.weights),
        "kinds": args.kinds,
        "c": format_rational(avg.c),
        "k_coeff": format_rational(avg.k_coeff),
        "coefficients": [
            {"side": list(cls.side), "value": format_rational(v)}
            for cls, v in sorted(
                avg.boundary_coeffs.items(), key=lambda kv: kv[0].sort_key()
            )
        ],
    }
    _emit(canonical_json(document), args.output)
    return EXIT_OK


def cmd_validate(args) -> int:
    try:
        divisor = parse_divisor(args.divisor)
        with open(args.certificate, encoding="utf-8") as fh:
            data = json.load(fh)
    except (ParseError, OSError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"invalid input: {exc}\n")
        return EXIT_INVALID
    if "certificate" in data:
        data = data["certificate"]
    try:
        cert = certificate_from_dict(data)
    except (DomainError, KeyError, ValueError) as exc:
        sys.stderr.write(f"invalid certificate: {exc}\n")
        return EXIT_INVALID
    result = validate_certificate(divisor, cert)
    sys.stdout.write(
        canonical_json(
            {
                "valid": result.valid,
                "proves_nef": result.proves_nef,
                "defect": result.defect,
            }
        )
    )
    return EXIT_OK if result.valid and result.proves_nef else EXIT_INCONCLUSIVE


def build_parser() -> _Parser:
    parser = _Parser(prog="nefcert", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="certify one divisor")
    p.add_argument("--divisor", required=True)
    p.add_argument("--config")
    p.add_argument("--output")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("facets", help="facet table for a genus")
    p.add_argument("--genus", type=int, required=True)
    p.add_argument("--output")
    p.set_defaults(func=cmd_facets)

    p = sub.add_parser("rays", help="extremal rays for a genus")
    p.add_argument("--genus", type=int, required=True)
    p.add_argument("--cache")
    p.add_argument("--no-cache", action="store_true")
    p.add_argument("--output")
    p.set_defaults(func=cmd_rays)

    p = sub.add_parser("verify", help="certify every ray of a genus")
    p.add_argument("--genus", type=int, required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--config")
    p.add_argument("--output-dir")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("expand", help="c-average coefficient table")
    p.add_argument("--genus", type=int, required=True)
    p.add_argument("--profile", required=True)
    p.add_argument("--divisor", required=True)
    p.add_argument("--kinds", required=True)
    p.add_argument("--c", required=True)
    p.add_argument("--output")
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("validate", help="re-check a certificate file")
    p.add_argument("--divisor", required=True)
    p.add_argument("--certificate", required=True)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
