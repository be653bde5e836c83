"""Command-line front end: ``pdakit <subcommand> ...``.

Exit status is 0 on success, 1 when a verification or decode check fails and
2 on usage errors. Results go to stdout (or ``-o``); diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import bench
from .caching_sim import DecodeError, run_roundtrip
from .cartesian import downgrade_regular, theorem1_scheme
from .constructions import (
    ParameterError,
    cwzw_pda,
    mn_pda,
    near_square_pda,
    replicate_users,
    ytcc_pda,
)
from .pda_core import (
    PdaError,
    StarRowCertificate,
    compute_params,
    find_certificate,
    read_pda,
    search_certificate,
    verify_certificate,
    verify_pda,
    write_pda,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


FAMILIES = {
    # name: (argument names, builder returning (pda, certificate or None))
    "mn": (("q", "z"), lambda q, z: (mn_pda(q, z), None)),
    "near-square": (("g",), near_square_pda),
    "ytcc": (("H", "a", "b", "r"), ytcc_pda),
    "cwzw": (("m", "q", "t"), cwzw_pda),
    "group": (("k", "t", "n"), lambda k, t, n: (replicate_users(mn_pda(k, t), n), None)),
}


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _params_dict(p) -> dict:
    c = compute_params(p)
    return {
        "K": c.K, "F": c.F, "Z": c.Z, "S": c.S,
        "memory_ratio": str(c.memory_ratio), "load": str(c.load),
        "regularity": c.regularity, "mean_gain": str(c.mean_gain),
    }


def cmd_construct(a) -> int:
    names, build = FAMILIES[a.family]
    if len(a.params) != len(names):
        raise UsageError(f"{a.family} takes {len(names)} integers: {' '.join(names)}")
    p, cert = build(*a.params)
    _emit(write_pda(p), a.output)
    if a.certificate_out:
        if cert is None:
            print(f"warning: {a.family} with these parameters has no built-in certificate",
                  file=sys.stderr)
        else:
            with open(a.certificate_out, "w", encoding="utf-8") as fh:
                fh.write(cert.to_json() + "\n")
    return EXIT_OK


def cmd_verify(a) -> int:
    text = _read_text(a.file)
    try:
        p = read_pda(text)
    except PdaError as exc:
        print(f"invalid array: {exc}", file=sys.stderr)
        return EXIT_FAIL
    report = verify_pda(p.grid, p.S)
    out = {"ok": report.ok, "violations": report.to_dict()["violations"]}
    status = EXIT_OK if report.ok else EXIT_FAIL
    if report.ok:
        out["params"] = _params_dict(p)
    if a.lam is not None and report.ok:
        res = find_certificate(p, a.lam)
        if res:
            out["certificate"] = res.to_dict()
        else:
            out["certificate"] = {"infeasible": res.stage, "reason": res.reason}
            status = EXIT_FAIL
    _emit(json.dumps(out) + "\n", a.output)
    for v in report.violations[:20]:
        print(f"{v.rule}: {v.msg}", file=sys.stderr)
    return status


def _load_cert(path: str) -> StarRowCertificate:
    try:
        return StarRowCertificate.from_dict(json.loads(_read_text(path)))
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise UsageError(f"bad certificate file {path}: {exc}") from None


def cmd_power(a) -> int:
    p = read_pda(_read_text(a.file))
    if a.certificate:
        cert = _load_cert(a.certificate)
        rep = verify_certificate(p, cert)
        if not rep.ok:
            print(f"certificate rejected: {rep.violations[0].msg}", file=sys.stderr)
            return EXIT_FAIL
    else:
        cert = search_certificate(p)
        if not cert:
            print(f"no star-row certificate ({cert.stage}): {cert.reason}", file=sys.stderr)
            return EXIT_FAIL
    _emit(write_pda(theorem1_scheme(p, cert, a.m)), a.output)
    return EXIT_OK


def cmd_downgrade(a) -> int:
    p = read_pda(_read_text(a.file))
    out, cert = downgrade_regular(p)
    _emit(write_pda(out), a.output)
    if a.certificate_out:
        with open(a.certificate_out, "w", encoding="utf-8") as fh:
            fh.write(cert.to_json() + "\n")
    return EXIT_OK


def _parse_demand(s: str) -> list[int]:
    try:
        return [int(x) for x in s.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"bad demand list {s!r}") from None


def cmd_simulate(a) -> int:
    p = read_pda(_read_text(a.file))
    d = _parse_demand(a.demand) if a.demand else None
    if d is not None and (len(d) != p.K or min(d) < 1 or max(d) > a.files):
        raise UsageError(f"demand needs {p.K} entries in [1:{a.files}]")
    try:
        rep = run_roundtrip(p, a.files, L=a.packet_bytes, d=d, seed=a.seed)
    except DecodeError as exc:
        print(f"decode failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    _emit(rep.to_json() + "\n", a.output)
    return EXIT_OK if rep.decode_ok else EXIT_FAIL


def cmd_compare(a) -> int:
    _emit(bench.render_compare(bench.compare_table(a.table, a.m)), a.output)
    return EXIT_OK


def _parse_ratio(tok: str) -> Fraction:
    try:
        return Fraction(tok.strip())
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"bad ratio {tok!r}") from None


def cmd_tradeoff(a) -> int:
    ratios = [_parse_ratio(t) for t in a.ratios.split(",") if t.strip()]
    res = bench.tradeoff_table(a.users, ratios)
    _emit(res.to_csv(), a.output)
    for x, why in res.skipped:
        print(f"skipped {x}: {why}", file=sys.stderr)
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # mapped to exit 2 in main
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="pdakit", description="Placement delivery arrays for coded caching.")
    sub = ap.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    def out_opt(sp):
        sp.add_argument("-o", "--output", help="write result here instead of stdout")

    sp = sub.add_parser("construct", help="build a base array")
    sp.add_argument("family", choices=sorted(FAMILIES))
    sp.add_argument("params", nargs="*", type=int)
    sp.add_argument("--certificate-out", help="also write the built-in star-row certificate (JSON)")
    out_opt(sp)
    sp.set_defaults(func=cmd_construct)

    sp = sub.add_parser("verify", help="check C1-C3 and report parameters")
    sp.add_argument("file", help="array file, or - for stdin")
    sp.add_argument("--lambda", dest="lam", type=int, help="also search a certificate with this lambda")
    out_opt(sp)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("power", help="m-fold Cartesian power of an array with a star-row certificate")
    sp.add_argument("file")
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--certificate", help="certificate JSON; searched for when omitted")
    out_opt(sp)
    sp.set_defaults(func=cmd_power)

    sp = sub.add_parser("downgrade", help="lower a g-regular array to a (g-1)-regular one")
    sp.add_argument("file")
    sp.add_argument("--certificate-out")
    out_opt(sp)
    sp.set_defaults(func=cmd_downgrade)

    sp = sub.add_parser("simulate", help="place, deliver and decode one demand")
    sp.add_argument("file")
    sp.add_argument("--files", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--demand", help="comma-separated 1-based file indices, one per user")
    sp.add_argument("--packet-bytes", type=int, default=64)
    out_opt(sp)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("compare", help="scheme comparison table as CSV")
    sp.add_argument("--table", type=int, choices=(3, 4), required=True)
    sp.add_argument("--m", type=int, default=1)
    out_opt(sp)
    sp.set_defaults(func=cmd_compare)

    sp = sub.add_parser("tradeoff", help="load and log2(F) versus memory ratio as CSV")
    sp.add_argument("--users", type=int, required=True)
    sp.add_argument("--ratios", required=True, help="comma-separated fractions, e.g. 1/23,5/11")
    out_opt(sp)
    sp.set_defaults(func=cmd_tradeoff)
    return ap


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"pdakit: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParameterError as exc:
        print(f"pdakit: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PdaError as exc:
        print(f"pdakit: {exc}", file=sys.stderr)
        return EXIT_FAIL


def _entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    _entry()
