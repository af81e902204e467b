"""Command line front end.

Exit codes: 0 pass, 2 input error, 3 cap error, 4 verification failure,
5 cache error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

from . import combid, deriv, gcm, liealg
from .roots import RootVec, highest_root, reflect, simple_root

EXIT_OK, EXIT_INPUT, EXIT_CAP, EXIT_VERIFY, EXIT_CACHE = 0, 2, 3, 4, 5


class InputError(Exception):
    pass


# ------------------------------------------------------------------ helpers


def _load_matrix(path) -> gcm.Gcm:
    if path is None:
        raise InputError("--matrix FILE is required")
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc.msg}") from exc
    if not isinstance(data, dict) or "matrix" not in data:
        raise InputError('matrix file must be a JSON object with a "matrix" key')
    try:
        return gcm.validate_gcm(data["matrix"])
    except (TypeError, ValueError) as exc:
        raise InputError(f"{type(exc).__name__}: {exc}") from exc


def _parse_beta(text, n: int) -> RootVec:
    try:
        vals = json.loads(text)
    except (TypeError, json.JSONDecodeError) as exc:
        raise InputError(f"--beta must be a JSON integer list, got {text!r}") from exc
    if not isinstance(vals, list) or len(vals) != n or not all(isinstance(v, int) for v in vals):
        raise InputError(f"--beta must be a list of {n} integers")
    return RootVec(vals)


def _cache_path(cache_dir, G: gcm.Gcm, N: int) -> Path:
    digest = hashlib.sha256(json.dumps(G.tolist()).encode()).hexdigest()[:16]
    return Path(cache_dir) / f"nil-{digest}-N{N}.json"


def _algebra(args, G: gcm.Gcm, N: int) -> liealg.GradedAlgebra:
    if args.cache:
        path = _cache_path(args.cache, G, N)
        if path.exists():
            try:
                data = json.loads(path.read_text())
            except json.JSONDecodeError as exc:
                raise liealg.CacheError(f"unreadable cache {path}") from exc
            alg = liealg.GradedAlgebra.from_json(data)
            if alg.gcm != G or alg.height_cap != N:
                raise liealg.CacheError(f"cache {path} does not match the requested matrix and height")
            return alg
    alg = liealg.build_nilradical(G, N)
    if args.cache:
        _write_cache(alg, _cache_path(args.cache, G, N))
    return alg


def _write_cache(alg: liealg.GradedAlgebra, path: Path):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(alg.to_json(), separators=(",", ":")) + "\n")


def _emit(args, obj, table_rows=None, headers=None):
    if args.format == "table" and table_rows is not None:
        widths = [max(len(str(h)), *(len(str(r[k])) for r in table_rows)) if table_rows else len(str(h)) for k, h in enumerate(headers)]
        print("  ".join(str(h).ljust(w) for h, w in zip(headers, widths)))
        for row in table_rows:
            print("  ".join(str(c).ljust(w) for c, w in zip(row, widths)))
        if isinstance(obj, dict) and "status" in obj:
            print(f"status: {obj['status']}")
    else:
        print(json.dumps(obj, sort_keys=False))


def _degree_rows(lines):
    return [(json.dumps(l["degree"]), l["dim"], l["inner"], l["outer"], l.get("status", "")) for l in lines]


# ------------------------------------------------------------------ commands


def cmd_classify(args) -> int:
    G = _load_matrix(args.matrix)
    t = gcm.classify(G)
    out: dict = {"type": t.kind}
    if t.kind != "indefinite":
        out["label"] = t.label
    try:
        out["symmetrizer"] = list(gcm.symmetrizer(G))
    except gcm.NotSymmetrizable:
        out["symmetrizer"] = "nonsymmetrizable"
    out["autA"] = len(gcm.diagram_automorphisms(G))
    if isinstance(t, gcm.Affine):
        out["marks"] = list(t.marks)
        out["comarks"] = list(t.comarks)
        out["epsilon"] = t.epsilon
        out["twist"] = t.twist
    _emit(args, out, [(k, json.dumps(v)) for k, v in out.items()], ["field", "value"])
    return EXIT_OK


def expected_outer_n(G: gcm.Gcm, t, beta: RootVec) -> int:
    """Outer dimension of Der(ñ+)_beta predicted by the classification."""
    n = G.size
    if isinstance(t, gcm.Finite):
        theta = highest_root(G)
        targets = {reflect(G, i, theta) - simple_root(n, i) for i in range(n)}
        return int(beta in targets)
    if isinstance(t, gcm.Affine):
        delta = RootVec(t.marks).scale(t.twist)
        if beta.is_positive() and all(b % d == 0 for b, d in zip(beta.coords, delta.coords)):
            ks = {b // d for b, d in zip(beta.coords, delta.coords)}
            return int(len(ks) == 1)
        return 0
    return 0


def cmd_der(args) -> int:
    G = _load_matrix(args.matrix)
    beta = _parse_beta(args.beta, G.size)
    alg = _algebra(args, G, args.height)
    sp = deriv.der_space_n(alg, beta)
    want = expected_outer_n(G, gcm.classify(G), beta)
    line = sp.report("pass" if sp.outer_dim == want else "fail")
    line["expected_outer"] = want
    _emit(args, line, _degree_rows([line]), ["degree", "dim", "inner", "outer", "status"])
    return EXIT_OK if line["status"] == "pass" else EXIT_VERIFY


def cmd_moody(args) -> int:
    G = _load_matrix(args.matrix)
    if not isinstance(gcm.classify(G), gcm.Indefinite):
        raise InputError("moody needs an indefinite matrix")
    H = args.H if args.H is not None else args.height - G.max_serre_height()
    if H < 1:
        raise liealg.CapTooSmall(f"N={args.height} leaves no room: need N >= {1 + G.max_serre_height()}")
    alg = _algebra(args, G, args.height)
    rep = deriv.verify_moody(G, alg, H, jobs=args.jobs)
    _emit(args, rep, _degree_rows(rep["degrees"]), ["degree", "dim", "inner", "outer", "status"])
    return EXIT_OK if rep["status"] == "pass" else EXIT_VERIFY


def cmd_borel(args) -> int:
    G = _load_matrix(args.matrix)
    beta = _parse_beta(args.beta, G.size) if args.beta else RootVec([0] * G.size)
    alg = _algebra(args, G, args.height)
    bor = liealg.BorelAlgebra(alg)
    sp = deriv.der_space_b(bor, beta)
    if beta.is_zero():
        want_dim, want_outer = deriv.borel_degree0_expected(bor), bor.h_dim * bor.center_dim
    elif beta.is_positive():
        want_dim, want_outer = alg.mult(beta), 0
    else:
        want_dim, want_outer = 0, 0
    ok = sp.dim == want_dim and sp.outer_dim == want_outer
    line = sp.report("pass" if ok else "fail")
    line.update({"h_dim": bor.h_dim, "center_dim": bor.center_dim, "expected_dim": want_dim})
    _emit(args, line, _degree_rows([line]), ["degree", "dim", "inner", "outer", "status"])
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_h1(args) -> int:
    G = _load_matrix(args.matrix)
    H = args.H if args.H is not None else args.height - G.max_serre_height() + 1
    if H < 1:
        raise liealg.CapTooSmall(f"N={args.height} is too small for any degree")
    alg = _algebra(args, G, args.height)
    rep = deriv.h1_report(alg, H, jobs=args.jobs)
    rows = [(json.dumps(l["degree"]), l["dim"], l["inner"], l["outer"], l["h1"]) for l in rep["degrees"]]
    _emit(args, rep, rows + [("total", "", "", "", rep["total"])], ["degree", "dim", "inner", "outer", "h1"])
    return EXIT_OK if rep["status"] == "pass" else EXIT_VERIFY


def cmd_identities(args) -> int:
    if args.rmax < 1 or args.sl2_max < 1:
        raise InputError("sweep bounds must be >= 1")
    if args.r1 is not None:
        if args.k0 is None or not (0 <= args.k0 < args.r1):
            raise InputError("--r1 needs --k0 with 0 <= k0 < r1")
        reps = [combid.beta_sum(args.r1, args.k0)]
        for r in range(args.r1, args.rmax + 1):
            for k in range(args.r1 + 1):
                reps.append(combid.vandermonde_check(r, args.r1, args.k0, k))
            if r > args.r1:
                reps.append(combid.coeff_3_16(r, args.r1, args.k0, corrected_sign=args.paper_domain))
        out = {"cases": [x.tojson() for x in reps], "status": "pass" if all(x.passed for x in reps) else "fail"}
        rows = [(x.name, json.dumps(x.params), combid._render(x.lhs), combid._render(x.rhs), x.passed) for x in reps]
        _emit(args, out, rows, ["identity", "params", "lhs", "rhs", "pass"])
        return EXIT_OK if out["status"] == "pass" else EXIT_VERIFY
    sw = combid.identity_sweep(args.rmax, args.sl2_max, paper_domain=args.paper_domain)
    out = {"summary": sw["summary"], "status": sw["status"]}
    out["failures"] = [x.tojson() for reps in sw["groups"].values() for x in reps if not x.passed][: args.show_failures]
    rows = [(k, v["cases"], v["failures"], v["status"]) for k, v in sw["summary"].items()]
    _emit(args, out, rows, ["identity", "cases", "failures", "status"])
    return EXIT_OK if sw["status"] == "pass" else EXIT_VERIFY


def cmd_build(args) -> int:
    G = _load_matrix(args.matrix)
    alg = liealg.build_nilradical(G, args.height)
    if args.cache:
        path = _cache_path(args.cache, G, args.height)
        _write_cache(alg, path)
    dims = alg.dims_by_height()
    out = {"height": args.height, "dims_by_height": dims, "degrees": {liealg._key(b): alg.mult(b) for b in alg.degrees()}}
    if args.cache:
        out["cache"] = str(path)
    _emit(args, out, [(h + 1, d) for h, d in enumerate(dims)], ["height", "dim"])
    return EXIT_OK


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="kmnil", description="Kac-Moody nilradicals, Borel subalgebras and their derivations.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, height=True, default_height=None):
        sp.add_argument("--matrix", metavar="FILE", help='JSON file {"matrix": [[...]]}')
        if height:
            sp.add_argument("--height", type=int, default=default_height, required=default_height is None, metavar="N")
        sp.add_argument("--format", choices=("json", "table"), default="json")
        sp.add_argument("--cache", metavar="DIR")
        sp.add_argument("--jobs", type=int, default=1, metavar="K")

    sp = sub.add_parser("classify", help="type, symmetrizer, Aut(A), marks")
    common(sp, height=False)
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("der", help="Der(n+) in one degree")
    common(sp)
    sp.add_argument("--beta", required=True)
    sp.set_defaults(func=cmd_der)

    sp = sub.add_parser("moody", help="check Der(n+) = ad(b+) for indefinite type")
    common(sp)
    sp.add_argument("-H", type=int, default=None, help="height bound (default N - max(2 - a_ij))")
    sp.set_defaults(func=cmd_moody)

    sp = sub.add_parser("borel", help="Der(b+) in one degree")
    common(sp)
    sp.add_argument("--beta", default=None)
    sp.set_defaults(func=cmd_borel)

    sp = sub.add_parser("h1", help="dim H^1(n+, n+) degree by degree")
    common(sp)
    sp.add_argument("-H", type=int, default=None)
    sp.set_defaults(func=cmd_h1)

    sp = sub.add_parser("identities", help="exact combinatorial identity sweeps")
    common(sp, height=False)
    sp.add_argument("--rmax", type=int, default=8)
    sp.add_argument("--sl2-max", type=int, default=10)
    sp.add_argument("--r1", type=int, default=None)
    sp.add_argument("--k0", type=int, default=None)
    sp.add_argument("--paper-domain", action="store_true", help="restrict Vandermonde to k >= r1-k0-1 and use the corrected sign")
    sp.add_argument("--show-failures", type=int, default=5)
    sp.set_defaults(func=cmd_identities)

    sp = sub.add_parser("build", help="build and cache the truncated nilradical")
    common(sp)
    sp.set_defaults(func=cmd_build)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    if getattr(args, "height", None) is not None and args.height < 2:
        print("error: --height must be >= 2", file=sys.stderr)
        return EXIT_INPUT
    if args.jobs < 1:
        print("error: --jobs must be >= 1", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except liealg.CapTooSmall as exc:
        print(f"error: CapTooSmall: {exc}", file=sys.stderr)
        return EXIT_CAP
    except liealg.CacheError as exc:
        print(f"error: CacheError: {exc}", file=sys.stderr)
        return EXIT_CACHE
    except (gcm.GcmError, gcm.NotSymmetrizable) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
