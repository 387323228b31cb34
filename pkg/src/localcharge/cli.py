"""Command-line interface.

    localcharge invariants --k 1 --j 3 --p "u^2"
    localcharge table --k 1 --j 3 --format csv
    localcharge graft --k 1 --j 6 --p "" --to 3
    localcharge decay --k 2 --j 2 --p "z*u" --max-kprime 8
    localcharge bounds --k 2 --j 3
    localcharge moduli --k 3 --n 2
    localcharge verify-bpst --samples 100 --seed 0
    localcharge adhm --file data.json

Exit codes: 0 ok, 1 usage or parse error, 2 truncation did not stabilize,
3 domain violation (parity, matrix shapes, formula range).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import List, Optional

from .bundle import BundleSpec, ExtensionClass, SpecError, format_class, parse_class, split_off
from .cache import InvariantCache
from .gauge import ADHMData, ShapeError, adhm_moment_maps, is_hermitian, verify_bpst
from .grafting import ParityViolation, closed_graft, decay_search
from .invariants import (
    DomainError,
    LocalInvariants,
    NonStabilized,
    TruncationPolicy,
    charge_bounds,
    compute_charge,
    extremal_search,
    instanton_moduli_dimension,
    is_instanton_type,
    moduli_dimension,
    table_specs,
    TableRow,
)

log = logging.getLogger("localcharge")

EXIT_OK, EXIT_USAGE, EXIT_NONSTABLE, EXIT_DOMAIN = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_p(text: Optional[str]) -> ExtensionClass:
    """--p accepts a monomial string or the JSON term list (or a whole spec object)."""
    if text is None:
        return ExtensionClass()
    s = text.strip()
    if s.startswith("[") or s.startswith("{"):
        try:
            data = json.loads(s)
        except json.JSONDecodeError as exc:
            raise SpecError(f"bad JSON for --p: {exc}") from exc
        if isinstance(data, dict):
            data = data.get("p", [])
        return ExtensionClass.from_json(data)
    return parse_class(s)


def build_spec(k: int, j: int, text: Optional[str]) -> BundleSpec:
    keep, dropped = split_off(k, j, parse_p(text))
    if dropped:
        log.warning("dropping coboundary terms %s for (k=%d, j=%d)", format_class(dropped), k, j)
    return BundleSpec(k, j, keep)


def policy_from(args, spec: BundleSpec) -> TruncationPolicy:
    base = TruncationPolicy.default(spec.k, spec.j)
    over = {}
    for name in ("u_cap", "z_halfwidth", "pole_cap", "step", "max_cap"):
        v = getattr(args, name, None)
        if v is not None:
            over[name] = v
    if not over:
        return base
    try:
        return TruncationPolicy(**{**base.to_json(), **over})
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


class Engine:
    """compute_charge behind the optional cache; only the main process writes."""

    def __init__(self, args):
        self.cache = None if getattr(args, "no_cache", False) else InvariantCache(getattr(args, "cache_dir", None))
        self.args = args
        self.jobs = max(1, getattr(args, "jobs", 1) or 1)

    def charge(self, spec: BundleSpec) -> LocalInvariants:
        return self.many([spec])[0]

    def many(self, specs: List[BundleSpec]) -> List[LocalInvariants]:
        policies = [policy_from(self.args, s) for s in specs]
        out: List[Optional[LocalInvariants]] = [None] * len(specs)
        missing = []
        for n, (s, p) in enumerate(zip(specs, policies)):
            hit = self.cache.get(s, p) if self.cache else None
            if hit is not None:
                out[n] = hit
            else:
                missing.append(n)
        if self.jobs > 1 and len(missing) > 1:
            with ProcessPoolExecutor(max_workers=self.jobs) as pool:
                computed = list(pool.map(compute_charge, [specs[n] for n in missing], [policies[n] for n in missing]))
        else:
            computed = [compute_charge(specs[n], policies[n]) for n in missing]
        for n, inv in zip(missing, computed):
            out[n] = inv
            if self.cache:
                self.cache.put(specs[n], policies[n], inv)
        return out


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _emit(text: str):
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


# --- commands -------------------------------------------------------------


def cmd_invariants(args) -> int:
    spec = build_spec(args.k, args.j, args.p)
    inv = Engine(args).charge(spec)
    if args.format == "json":
        _emit(json.dumps({"spec": spec.to_json(), "policy": policy_from(args, spec).to_json(), **inv.to_json()}))
    elif args.format == "csv":
        _emit(_csv(["monomial", "width", "height", "charge"], [[format_class(spec.p), inv.width, inv.height, inv.charge]]))
    else:
        _emit(f"width={inv.width} height={inv.height} charge={inv.charge}")
    return EXIT_OK


def cmd_table(args) -> int:
    rng = random.Random(args.random_coefficients) if args.random_coefficients is not None else None
    specs = table_specs(args.k, args.j, rng)
    rows = [TableRow(s, inv) for s, inv in zip(specs, Engine(args).many(specs))]
    if args.format == "csv":
        _emit(_csv(["monomial", "width", "height", "charge"],
                   [[r.label, r.invariants.width, r.invariants.height, r.invariants.charge] for r in rows]))
    elif args.format == "json":
        ext = extremal_search(args.k, args.j, rows=rows)
        _emit(json.dumps({"k": args.k, "j": args.j, "rows": [r.to_json() for r in rows],
                          "min_charge": ext.min_charge, "max_charge": ext.max_charge}))
    else:
        width = max(len("monomial"), *(len(r.label) for r in rows))
        lines = [f"{'monomial':<{width}}  width  height  charge"]
        for r in rows:
            i = r.invariants
            lines.append(f"{r.label:<{width}}  {i.width:>5}  {i.height:>6}  {i.charge:>6}")
        _emit("\n".join(lines))
    return EXIT_OK


def _graft_policy(args, spec):
    # explicit overrides apply to both sides; otherwise each side gets its default
    if any(getattr(args, n, None) is not None for n in ("u_cap", "z_halfwidth", "pole_cap", "step", "max_cap")):
        return policy_from(args, spec)
    return None


def cmd_graft(args) -> int:
    spec = build_spec(args.k, args.j, args.p)
    res = closed_graft(spec, args.to, _graft_policy(args, spec))
    if args.format == "json":
        _emit(json.dumps(res.to_json()))
    else:
        line = res.summary()
        if res.dropped_terms:
            line += f"; dropped {format_class(res.dropped_terms)}"
        if res.extrapolation:
            line += "; extrapolation (k' < k)"
        _emit(line)
    return EXIT_OK


def cmd_decay(args) -> int:
    spec = build_spec(args.k, args.j, args.p)
    results = decay_search(spec, args.max_kprime, _graft_policy(args, spec), jobs=max(1, args.jobs))
    if args.format == "json":
        _emit(json.dumps([r.to_json() for r in results]))
    elif args.format == "csv":
        _emit(_csv(["k_from", "k_to", "charge_before", "charge_after", "charge_loss", "instanton_after", "extrapolation"],
                   [[r.before_k, r.after_k, r.before.charge, r.after.charge, r.charge_loss,
                     r.instanton_after, r.extrapolation] for r in results]))
    else:
        lines = []
        for r in results:
            flags = []
            if not r.instanton_after:
                flags.append("not instanton type")
            if r.extrapolation:
                flags.append("extrapolation")
            tail = f" [{', '.join(flags)}]" if flags else ""
            lines.append(f"Z_{r.before_k} -> Z_{r.after_k}: {r.summary()}{tail}")
        _emit("\n".join(lines) if lines else "no admissible k'")
    return EXIT_OK


def cmd_bounds(args) -> int:
    b = charge_bounds(args.k, args.j)
    if args.format == "json":
        _emit(json.dumps({"k": args.k, "j": args.j, **b.to_json(), "instanton_type": is_instanton_type(args.k, args.j)}))
    else:
        _emit(str(b))
    return EXIT_OK


def cmd_moduli(args) -> int:
    if (args.j is None) == (args.n is None):
        raise UsageError("give exactly one of --j or --n")
    if args.j is not None:
        dim, what = moduli_dimension(args.k, args.j), "bundles"
    else:
        dim, what = instanton_moduli_dimension(args.k, args.n), "instantons"
    if args.format == "json":
        _emit(json.dumps({"k": args.k, "j": args.j, "n": args.n, "moduli": what, "dimension": dim}))
    else:
        _emit(str(dim))
    return EXIT_OK


def cmd_verify_bpst(args) -> int:
    rep = verify_bpst(args.samples, args.seed)
    if args.format == "json":
        _emit(json.dumps(rep.to_json()))
    elif rep.ok:
        _emit(f"ASD verified: residual 0 at {rep.zero_points}/{rep.points} points; orientation: {rep.orientation_name}")
    else:
        _emit(f"ASD FAILED: residual 0 at {rep.zero_points}/{rep.points} points, max residual {rep.max_residual}")
        return EXIT_DOMAIN
    return EXIT_OK


def cmd_adhm(args) -> int:
    try:
        with open(args.file, encoding="utf-8") as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {args.file}: {exc}") from exc
    try:
        data = ADHMData.from_json(raw)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ShapeError):
            raise
        raise UsageError(f"bad matrix entry: {exc}") from exc
    mu_r, mu_c = adhm_moment_maps(data)
    out = {
        "k": data.k,
        "N": data.N,
        "mu_r": [[x.to_json() for x in row] for row in mu_r],
        "mu_c": [[x.to_json() for x in row] for row in mu_c],
        "mu_r_hermitian": is_hermitian(mu_r),
    }
    if args.format == "json":
        _emit(json.dumps(out))
    else:
        _emit("mu_r = " + "; ".join(" ".join(str(x) for x in row) for row in mu_r))
        _emit("mu_c = " + "; ".join(" ".join(str(x) for x in row) for row in mu_c))
    return EXIT_OK


# --- parser ---------------------------------------------------------------


def _add_spec_args(p, p_required=False):
    p.add_argument("--k", type=int, required=True, help="self-intersection -k of the curve")
    p.add_argument("--j", type=int, required=True, help="splitting type")
    p.add_argument("--p", default="", help='extension class, e.g. "z^-1*u + 2*u^2", or JSON terms')


def _add_policy_args(p):
    g = p.add_argument_group("truncation policy")
    g.add_argument("--u-cap", dest="u_cap", type=int)
    g.add_argument("--z-halfwidth", dest="z_halfwidth", type=int)
    g.add_argument("--pole-cap", dest="pole_cap", type=int)
    g.add_argument("--step", type=int)
    g.add_argument("--max-cap", dest="max_cap", type=int)
    g.add_argument("--cache-dir", dest="cache_dir", default=None, help="cache directory (env LOCALCHARGE_CACHE_DIR)")
    g.add_argument("--no-cache", dest="no_cache", action="store_true")
    g.add_argument("--jobs", type=int, default=1, help="worker processes")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="localcharge", description="Local charges of rank-2 bundles on Z_k.")
    ap.add_argument("-v", "--verbose", action="count", default=0)
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("invariants", help="width, height and charge of one bundle")
    _add_spec_args(p)
    p.add_argument("--format", choices=["table", "json", "csv"], default="table")
    _add_policy_args(p)
    p.set_defaults(func=cmd_invariants)

    p = sub.add_parser("table", help="invariants of every window monomial and the zero class")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--j", type=int, required=True)
    p.add_argument("--format", choices=["table", "json", "csv"], default="table")
    p.add_argument("--random-coefficients", dest="random_coefficients", type=int, metavar="SEED",
                   help="use random rational coefficients instead of 1")
    _add_policy_args(p)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("graft", help="closed graft Z_k -> Z_k'")
    _add_spec_args(p)
    p.add_argument("--to", type=int, required=True, help="target k'")
    p.add_argument("--format", choices=["table", "json"], default="table")
    _add_policy_args(p)
    p.set_defaults(func=cmd_graft)

    p = sub.add_parser("decay", help="closed grafts to every admissible k' <= max")
    _add_spec_args(p)
    p.add_argument("--max-kprime", dest="max_kprime", type=int, required=True)
    p.add_argument("--format", choices=["table", "json", "csv"], default="table")
    _add_policy_args(p)
    p.set_defaults(func=cmd_decay)

    p = sub.add_parser("bounds", help="sharp local charge bounds")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--j", type=int, required=True)
    p.add_argument("--format", choices=["table", "json"], default="table")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("moduli", help="moduli dimension of bundles (--j) or instantons (--n)")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--j", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--format", choices=["table", "json"], default="table")
    p.set_defaults(func=cmd_moduli)

    p = sub.add_parser("verify-bpst", help="exact anti-self-duality check of the BPST instanton")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=["table", "json"], default="table")
    p.set_defaults(func=cmd_verify_bpst)

    p = sub.add_parser("adhm", help="ADHM moment maps of matrices in a JSON file")
    p.add_argument("--file", required=True)
    p.add_argument("--format", choices=["table", "json"], default="table")
    p.set_defaults(func=cmd_adhm)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except NonStabilized as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONSTABLE
    except (ParityViolation, ShapeError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (SpecError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
