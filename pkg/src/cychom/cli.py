"""Command line interface: homology tables, comparison checks, K-groups.

Exit codes: 0 success, 1 a verification command found failing cells,
2 invalid arguments, 3 degree out of computable or verified range,
4 unparseable input file.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from . import cyclic, dga, filtered, hochschild, ktheory
from .errors import (
    BoundTooSmall,
    CychomError,
    InvalidModulus,
    InvalidParams,
    NotDivisible,
    OutOfRange,
    ParseError,
    RangeEmpty,
    TruncationTooTight,
)
from .intlin import AbelianGroup, is_prime

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_BAD_ARGS = 2
EXIT_RANGE = 3
EXIT_PARSE = 4


@dataclass(frozen=True)
class JobSpec:
    command: str
    params: Dict[str, object]
    structured: bool


@dataclass
class ResultRow:
    degree: int
    group: AbelianGroup
    flags: Tuple[str, ...] = ()
    provenance: Tuple[str, ...] = ()
    label: str = ""


def _row_json(row: ResultRow) -> Dict[str, object]:
    return {
        "degree": row.degree,
        "free_rank": row.group.free_rank,
        "invariant_factors": [str(d) for d in row.group.invariant_factors],
        "flags": sorted(row.flags),
        "provenance": list(row.provenance),
    }


def _emit(spec: JobSpec, rows: List[ResultRow], out) -> None:
    if spec.structured:
        doc = {
            "schema_version": SCHEMA_VERSION,
            "command": spec.command,
            "params": {k: spec.params[k] for k in sorted(spec.params)},
            "results": [_row_json(r) for r in rows],
        }
        out.write(json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n")
    else:
        for r in rows:
            flags = (" [" + ",".join(sorted(r.flags)) + "]") if r.flags else ""
            out.write(f"{r.label or r.degree}: {r.group}{flags}\n")


@dataclass(frozen=True)
class RingDescriptor:
    p: Optional[int]
    n: Optional[int]
    algebra: dga.DGAlgebra

    @property
    def builtin(self) -> bool:
        return self.p is not None


def _parse_ring(text: str) -> RingDescriptor:
    if text.startswith("zmod:"):
        body = text[len("zmod:") :]
        if "^" in body:
            p_s, n_s = body.split("^", 1)
        else:
            p_s, n_s = body, "1"
        try:
            p, n = int(p_s), int(n_s)
        except ValueError:
            raise InvalidParams(f"bad ring descriptor {text!r}")
        if not is_prime(p) or n < 1:
            raise InvalidParams(f"descriptor {text!r} needs a prime and level >= 1")
        return RingDescriptor(p, n, dga.koszul_resolution(p ** n))
    try:
        with open(text) as fh:
            source = fh.read()
    except OSError as e:
        raise ParseError(f"cannot read ring file {text!r}: {e}")
    return RingDescriptor(None, None, dga.load_algebra(source))


def _degree_plan(ring: RingDescriptor, max_degree, allow_unverified: bool):
    """Resolve the degree range and which degrees get UNVERIFIED flags."""
    if ring.builtin:
        verified_top = 2 * ring.p - 1
        if max_degree is None:
            max_degree = verified_top
        if max_degree > verified_top and not allow_unverified:
            raise OutOfRange(
                f"degree {max_degree} exceeds the verified window {verified_top}; "
                "pass --allow-unverified to compute it anyway"
            )
        return max_degree, verified_top
    if max_degree is None:
        raise InvalidParams("--max-degree is required for file-based rings")
    return max_degree, None


def _table_rows(values, verified_top, kind) -> List[ResultRow]:
    rows = []
    for i, g in values:
        flags = ()
        if verified_top is not None and i > verified_top:
            flags = ("UNVERIFIED",)
        rows.append(ResultRow(i, g, flags, (kind,), label=f"{kind}_{i}"))
    return rows


def _cmd_hh(spec: JobSpec, out) -> int:
    ring = _parse_ring(spec.params["ring"])
    top, verified = _degree_plan(
        ring, spec.params.get("max_degree"), spec.params.get("allow_unverified", False)
    )
    H = hochschild.hochschild_complex(ring.algebra, top)
    values = [(i, H.homology(i)) for i in range(top + 1)]
    _emit(spec, _table_rows(values, verified, "HH"), out)
    return EXIT_OK


def _cmd_hc(spec: JobSpec, out) -> int:
    ring = _parse_ring(spec.params["ring"])
    top, verified = _degree_plan(
        ring, spec.params.get("max_degree"), spec.params.get("allow_unverified", False)
    )
    bundle = cyclic.cyclic_bundle(ring.algebra, top)
    values = [(i, cyclic.homology(bundle.total, i)) for i in range(top + 1)]
    _emit(spec, _table_rows(values, verified, "HC"), out)
    return EXIT_OK


def _cmd_rel_hc(spec: JobSpec, out) -> int:
    ring = _parse_ring(spec.params["ring"])
    if not ring.builtin:
        raise InvalidParams("rel-hc needs a builtin zmod:p^n ring")
    if ring.n < 2:
        raise InvalidParams("rel-hc needs level n >= 2")
    top, verified = _degree_plan(
        ring, spec.params.get("max_degree"), spec.params.get("allow_unverified", False)
    )
    f = dga.reduction_map(ring.p ** ring.n, ring.p ** (ring.n - 1))
    _, _, F = cyclic.induced_cyclic_map(f, top + 1)
    cone = cyclic.mapping_cone(F)
    values = [(i, cyclic.homology(cone, i + 1)) for i in range(top + 1)]
    _emit(spec, _table_rows(values, verified, "rel-HC"), out)
    return EXIT_OK


def _cmd_k_groups(spec: JobSpec, out) -> int:
    p, n = spec.params["p"], spec.params["n"]
    table = ktheory.k_table(p, n)
    rows = [
        ResultRow(i, e.group, (), e.provenance, label=f"K_{i}")
        for i, e in sorted(table.items())
    ]
    _emit(spec, rows, out)
    return EXIT_OK


def _cmd_gr_check(spec: JobSpec, out) -> int:
    text = spec.params["ring"]
    if text.startswith("zmod:"):
        desc = _parse_ring(text)
        M = filtered.adic_filtration(desc.p, desc.n)
    else:
        try:
            with open(text) as fh:
                M = filtered.load_filtered_ring(fh.read())
        except OSError as e:
            raise ParseError(f"cannot read filtered ring file {text!r}: {e}")
    max_q = spec.params.get("max_q", 3)
    m = M.depth()
    rows = []
    failures = 0
    for q in range(max_q + 1):
        for k in range(-(q + 1) * m - 1, 2):
            rep = filtered.graded_comparison(M, q, k)
            ok = bool(rep)
            failures += 0 if ok else 1
            rows.append(
                ResultRow(
                    k,
                    rep.lhs,
                    () if ok else ("FAIL",),
                    (f"q={q}",),
                    label=f"q={q},k={k}:{'PASS' if ok else 'FAIL'}",
                )
            )
    _emit(spec, rows, out)
    return EXIT_OK if failures == 0 else EXIT_CHECK_FAILED


def _expected_hc(p: int, n: int, i: int) -> AbelianGroup:
    if i % 2:
        return AbelianGroup.trivial()
    j = i // 2 + 1
    return AbelianGroup.cyclic(p ** (n * j))


def _expected_rel(p: int, i: int) -> AbelianGroup:
    if i % 2:
        return AbelianGroup.trivial()
    j = i // 2 + 1
    return AbelianGroup.cyclic(p ** j)


def _cmd_reproduce_paper(spec: JobSpec, out) -> int:
    p_list = spec.params["p_list"]
    n_list = spec.params["n_list"]
    for p in p_list:
        if not is_prime(p) or p < 3:
            raise InvalidParams(f"reproduce-paper needs odd primes, got {p}")
    lines: List[str] = []
    failures = 0

    def cell(name: str, ok: bool, detail: str = ""):
        nonlocal failures
        failures += 0 if ok else 1
        suffix = f" ({detail})" if detail and not ok else ""
        lines.append(f"{'PASS' if ok else 'FAIL'} {name}{suffix}")

    for p in sorted(set(p_list)):
        for n in sorted(set(n_list)):
            A = dga.koszul_resolution(p ** n)
            top = 2 * p - 1
            H = hochschild.hochschild_complex(A, top)
            bundle = cyclic.cyclic_bundle(A, top)
            for i in range(top + 1):
                want = (
                    AbelianGroup.cyclic(p ** n)
                    if i % 2 == 0
                    else AbelianGroup.trivial()
                )
                got = H.homology(i)
                cell(f"hh p={p} n={n} i={i}", got == want, f"got {got}, want {want}")
            for i in range(top + 1):
                want = _expected_hc(p, n, i)
                got = cyclic.homology(bundle.total, i)
                cell(f"hc p={p} n={n} i={i}", got == want, f"got {got}, want {want}")
            for i in range(top + 1):
                want = AbelianGroup.cyclic(p)
                got = cyclic.homology_mod(bundle.total, i, p)
                cell(
                    f"hc-mod-p p={p} n={n} i={i}",
                    got == want,
                    f"got {got}, want {want}",
                )
            if n >= 2:
                f = dga.reduction_map(p ** n, p ** (n - 1))
                _, _, F = cyclic.induced_cyclic_map(f, top + 1)
                cone = cyclic.mapping_cone(F)
                for i in range(top + 1):
                    want = _expected_rel(p, i)
                    got = cyclic.homology(cone, i + 1)
                    cell(
                        f"rel-hc p={p} n={n} i={i}",
                        got == want,
                        f"got {got}, want {want}",
                    )
                for i in range(top + 1):
                    rep = cyclic.hc_tower_surjectivity(p, n, i)
                    cell(f"tower p={p} n={n} i={i}", bool(rep))
        if p >= 5:
            for n in sorted(set(n_list)):
                table = ktheory.k_table(p, n)
                for i, entry in sorted(table.items()):
                    if i % 2 == 0:
                        want = AbelianGroup.trivial()
                    else:
                        j = (i + 1) // 2
                        want = AbelianGroup.cyclic(p ** (j * (n - 1)) * (p ** j - 1))
                    cell(
                        f"k p={p} n={n} i={i}",
                        entry.group == want,
                        f"got {entry.group}, want {want}",
                    )
    for line in lines:
        out.write(line + "\n")
    out.write(f"{'OK' if failures == 0 else 'FAILED'}: {failures} failing cells\n")
    return EXIT_OK if failures == 0 else EXIT_CHECK_FAILED


_COMMANDS = {
    "hh": _cmd_hh,
    "hc": _cmd_hc,
    "rel-hc": _cmd_rel_hc,
    "gr-check": _cmd_gr_check,
    "k-groups": _cmd_k_groups,
    "reproduce-paper": _cmd_reproduce_paper,
}


def run(spec: JobSpec, out=None) -> int:
    """Execute a job; returns the process exit code."""
    out = out if out is not None else sys.stdout
    handler = _COMMANDS.get(spec.command)
    if handler is None:
        print(f"unknown command {spec.command!r}", file=sys.stderr)
        return EXIT_BAD_ARGS
    try:
        return handler(spec, out)
    except ParseError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except (BoundTooSmall, TruncationTooTight, OutOfRange, RangeEmpty) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RANGE
    except (InvalidParams, InvalidModulus, NotDivisible) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_BAD_ARGS


def _int_list(text: str) -> List[int]:
    if not text.strip():
        return []
    try:
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers: {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cychom",
        description="Exact homology tables for small differential graded rings.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_ring_options(sp, rel=False):
        sp.add_argument(
            "--ring",
            required=True,
            help="builtin descriptor zmod:p^n or a path to an algebra file",
        )
        sp.add_argument("--max-degree", type=int, default=None)
        sp.add_argument(
            "--allow-unverified",
            action="store_true",
            help="permit degrees beyond 2p-1 (results flagged UNVERIFIED)",
        )
        sp.add_argument("--format", choices=("text", "structured"), default="text")

    add_ring_options(sub.add_parser("hh", help="Hochschild homology table"))
    add_ring_options(sub.add_parser("hc", help="cyclic homology table"))
    add_ring_options(sub.add_parser("rel-hc", help="relative cyclic homology table"))

    gr = sub.add_parser("gr-check", help="graded comparison report")
    gr.add_argument("--ring", required=True)
    gr.add_argument("--max-q", type=int, default=3)
    gr.add_argument("--format", choices=("text", "structured"), default="text")

    kg = sub.add_parser("k-groups", help="K-group table of Z/p^n")
    kg.add_argument("--p", type=int, required=True)
    kg.add_argument("--n", type=int, required=True)
    kg.add_argument("--format", choices=("text", "structured"), default="text")

    rp = sub.add_parser("reproduce-paper", help="re-verify the published tables")
    rp.add_argument("--p-list", type=_int_list, default=[3, 5, 7])
    rp.add_argument("--n-list", type=_int_list, default=[1, 2, 3])
    rp.add_argument("--format", choices=("text", "structured"), default="text")
    return parser


def _spec_from_args(args) -> JobSpec:
    params: Dict[str, object] = {}
    for key in ("ring", "max_degree", "allow_unverified", "p", "n", "max_q"):
        if hasattr(args, key) and getattr(args, key) is not None:
            params[key] = getattr(args, key)
    if hasattr(args, "p_list"):
        params["p_list"] = args.p_list
        params["n_list"] = args.n_list
    return JobSpec(
        command=args.command,
        params=params,
        structured=getattr(args, "format", "text") == "structured",
    )


def main(argv: Sequence[str] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_BAD_ARGS if e.code not in (0, None) else 0
    if getattr(args, "n", None) is not None and args.n < 1:
        print("error: --n must be >= 1", file=sys.stderr)
        return EXIT_BAD_ARGS
    if getattr(args, "max_degree", None) is not None and args.max_degree < 0:
        print("error: --max-degree must be nonnegative", file=sys.stderr)
        return EXIT_BAD_ARGS
    return run(_spec_from_args(args))


if __name__ == "__main__":
    sys.exit(main())
