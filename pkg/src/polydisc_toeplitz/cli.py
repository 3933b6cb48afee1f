"""Command-line interface.

Exit codes: 0 success or PASS, 1 FAIL verdict, 2 invalid input,
3 INCONCLUSIVE or numeric budget exceeded. Reports are JSON (sorted keys,
no timestamps) so identical inputs give byte-identical output.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, fields, replace

from . import checkers
from .checkers import FAIL, INCONCLUSIVE
from .errors import BudgetExceeded, InvalidInput, ToeplitzError
from .laurent import LaurentPoly
from .linalg import matrix_from_json, matrix_to_json
from .structure import classify_operator, classify_variables, factorize, hw_decompose
from .symbol import (
    Symbol, is_exact, parse_value, symbol_from_json, symbol_hash, symbol_to_json, to_laurent,
)
from .toeplitz import DegreeBox, compression

CONFIG_ENV = "POLYDISC_TOEPLITZ_CONFIG"
EXIT_OK, EXIT_FAIL, EXIT_INVALID, EXIT_INCONCLUSIVE = 0, 1, 2, 3
CSV_HEADER = ("box", "value", "gap", "leakage_bound")


@dataclass(frozen=True)
class RunConfig:
    """Run parameters. Box fields hold one int (broadcast) or one int per variable."""

    d: tuple = (3,)
    D: tuple = (24,)
    eps: float = 1e-10
    tol_pass: float = 1e-8
    tol_fail: float = 1e-2
    rank_tol: float = 1e-8
    model_tol: float = 1e-8
    grid_m: int = 64
    max_power: int = 4
    max_m: int = 20
    format: str = "json"
    output: str | None = None

    def __post_init__(self):
        for name in ("eps", "tol_pass", "tol_fail", "rank_tol", "model_tol"):
            if not getattr(self, name) > 0:
                raise InvalidInput(f"{name} must be positive")
        if self.tol_pass >= self.tol_fail:
            raise InvalidInput("tol_pass must be below tol_fail")
        for name in ("grid_m", "max_power", "max_m"):
            if getattr(self, name) < 1:
                raise InvalidInput(f"{name} must be >= 1")
        if self.format not in ("json", "csv"):
            raise InvalidInput("format must be json or csv")
        object.__setattr__(self, "d", _int_tuple(self.d))
        object.__setattr__(self, "D", _int_tuple(self.D))

    def boxes(self, n: int) -> tuple[DegreeBox, DegreeBox]:
        d, D = _broadcast(self.d, n, "d"), _broadcast(self.D, n, "D")
        if not d <= D:
            raise InvalidInput(f"inner box {d.d} is not inside outer box {D.d}")
        return d, D

    def to_json(self, n: int | None = None) -> dict:
        out = asdict(self)
        out.pop("output")
        if n is not None:
            d, D = self.boxes(n)
            out["d"], out["D"] = list(d.d), list(D.d)
        else:
            out["d"], out["D"] = list(self.d), list(self.D)
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "RunConfig":
        if not isinstance(obj, dict):
            raise InvalidInput("config must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = set(obj) - known
        if unknown:
            raise InvalidInput(f"unknown config keys: {sorted(unknown)}")
        return cls(**obj)


def _int_tuple(x):
    if isinstance(x, int):
        return (x,)
    try:
        out = tuple(int(v) for v in x)
    except (TypeError, ValueError) as exc:
        raise InvalidInput(f"box must be integers, got {x!r}") from exc
    if not out or min(out) < 0:
        raise InvalidInput(f"box must be nonnegative integers, got {x!r}")
    return out


def _broadcast(t, n, name) -> DegreeBox:
    if len(t) == 1:
        return DegreeBox(t * n)
    if len(t) != n:
        raise InvalidInput(f"box {name}={list(t)} has {len(t)} entries for {n} variables")
    return DegreeBox(t)


def parse_box(text: str) -> tuple:
    """``"3"`` or ``"3,4"`` -> tuple of ints."""
    try:
        return tuple(int(v) for v in text.split(","))
    except ValueError as exc:
        raise InvalidInput(f"bad box {text!r}") from exc


# ---------------------------------------------------------------- io helpers

def _load_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InvalidInput(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"{path} is not valid JSON: {exc}") from exc


def _load_symbol(path: str) -> Symbol:
    return symbol_from_json(_load_json(path))


def _load_pair(path: str):
    obj = _load_json(path)
    if not isinstance(obj, dict) or not {"vars", "phi1", "phi2"} <= set(obj):
        raise InvalidInput('pair file needs "vars", "phi1" and "phi2"')
    n = obj["vars"]
    return (symbol_from_json({"vars": n, "expr": obj["phi1"]}),
            symbol_from_json({"vars": n, "expr": obj["phi2"]}))


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"


def _csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow([r[k] for k in CSV_HEADER])
    return buf.getvalue()


def _box_label(box) -> str:
    return "x".join(str(v) for v in (box.d if isinstance(box, DegreeBox) else box))


def _exit_for(verdicts) -> int:
    verdicts = list(verdicts)
    if FAIL in verdicts:
        return EXIT_FAIL
    if INCONCLUSIVE in verdicts:
        return EXIT_INCONCLUSIVE
    return EXIT_OK


# ---------------------------------------------------------------- commands

def _envelope(cfg: RunConfig, n: int | None, **payload) -> dict:
    out = {"config": cfg.to_json(n)}
    out.update(payload)
    return out


def cmd_symbol_validate(args, cfg):
    phi = _load_symbol(args.file)
    cls = classify_variables(phi, cfg.eps)
    return _envelope(cfg, None, symbol=symbol_to_json(phi), symbol_hash=symbol_hash(phi),
                     exact=is_exact(phi), variables=cls.to_json()), EXIT_OK


def cmd_matrix(args, cfg):
    phi = _load_symbol(args.file)
    box = _broadcast(parse_box(args.box), phi.n, "box") if args.box else cfg.boxes(phi.n)[0]
    cm = compression(phi, box, cfg.eps)
    out = matrix_to_json(cm.M)
    out["header"] = cm.header()
    out["symbol_hash"] = symbol_hash(phi)
    return out, EXIT_OK


def _check_one(name, path, cfg, args):
    tols = {"tol_pass": cfg.tol_pass, "tol_fail": cfg.tol_fail}
    if name == "doubly-commuting":
        obj = _load_json(path)
        if not isinstance(obj, dict) or "generators" not in obj:
            raise InvalidInput('generator file needs "generators"')
        gens = obj["generators"]
        n = obj.get("vars", len(gens[0]) if gens else 0)
        box = _broadcast(parse_box(args.box), n, "box") if args.box else cfg.boxes(n)[0]
        reports = [checkers.check_doubly_commuting(gens, box, args.guard)]
        return _envelope(cfg, n, reports=[r.to_json() for r in reports]), reports
    if name in ("commutation", "final-projection"):
        phi1, phi2 = _load_pair(path)
        d, D = cfg.boxes(phi1.n)
        if name == "commutation":
            reports = list(checkers.check_commutation(phi1, phi2, d, D, cfg.eps, **tols))
        else:
            reports = [checkers.check_final_projection(phi1, phi2, d, D, cfg.eps, **tols)]
        hashes = [symbol_hash(phi1), symbol_hash(phi2)]
        return _envelope(cfg, phi1.n, symbol_hash=hashes,
                         reports=[r.to_json() for r in reports]), reports
    phi = _load_symbol(path)
    d, D = cfg.boxes(phi.n)
    if name == "unimodular":
        reports = [checkers.check_unimodular(phi, cfg.grid_m, **tols)]
    elif name == "partial-isometry":
        reports = [checkers.check_partial_isometry(phi, d, D, cfg.eps, **tols)]
    elif name == "power-pi":
        reports = checkers.check_power_partial_isometry(phi, cfg.max_power, d, D, cfg.eps, **tols)
    elif name == "hyponormal":
        reports = [checkers.check_hyponormal(phi, d, D, cfg.eps, **tols)]
    elif name == "range-invariance":
        reports = [checkers.check_range_invariance(phi, D)]
    else:  # pragma: no cover - argparse restricts choices
        raise InvalidInput(f"unknown check {name}")
    return _envelope(cfg, phi.n, symbol_hash=symbol_hash(phi),
                     reports=[r.to_json() for r in reports]), reports


def cmd_check(args, cfg):
    def run(path):
        return _check_one(args.name, path, cfg, args)

    if args.jobs > 1 and len(args.files) > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(run, args.files))
    else:
        results = [run(p) for p in args.files]
    verdicts = [r.verdict for _, reps in results for r in reps]
    if len(results) == 1:
        return results[0][0], _exit_for(verdicts)
    out = {"files": list(args.files), "results": [doc for doc, _ in results]}
    return out, _exit_for(verdicts)


def _parse_sweep(text: str, n: int) -> list:
    out = []
    for item in text.split(","):
        parts = tuple(int(v) for v in item.split("x"))
        out.append(_broadcast(parts, n, "sweep"))
    return out


def cmd_norm(args, cfg):
    phi = _load_symbol(args.file)
    try:
        sweep = _parse_sweep(args.box_sweep, phi.n)
    except ValueError as exc:
        raise InvalidInput(f"bad --box-sweep {args.box_sweep!r}") from exc
    est = checkers.estimate_norm(phi, sweep, cfg.grid_m, cfg.eps)
    if cfg.format == "csv":
        rows = [{"box": _box_label(r["box"]), "value": repr(r["value"]), "gap": repr(r["gap"]),
                 "leakage_bound": repr(r["leakage_bound"])} for r in est.rows]
        return _csv(rows), EXIT_OK
    return _envelope(cfg, phi.n, symbol_hash=symbol_hash(phi), norm=est.to_json()), EXIT_OK


def _parse_vector(text: str, n: int) -> LaurentPoly:
    if os.path.exists(text):
        obj = _load_json(text)
    else:
        try:
            obj = json.loads(text)
        except json.JSONDecodeError:
            obj = None
    if not isinstance(obj, dict):
        v = parse_value(text)
        if not hasattr(v, "abs2"):
            raise InvalidInput("--vector constants must be exact literals")
        return LaurentPoly.constant(n, v)
    if "expr" in obj:
        phi = symbol_from_json(obj)
        if not is_exact(phi):
            raise InvalidInput("--vector must be an exact polynomial")
        return to_laurent(phi)
    return LaurentPoly.from_json(n, obj)


def cmd_decay(args, cfg):
    phi = _load_symbol(args.file)
    f = _parse_vector(args.vector, phi.n)
    norms = checkers.shift_decay(phi, f, cfg.max_m)
    # coefficient error per application is at most the series l1 error
    err_unit = 0.0 if is_exact(phi) else 1e-15
    fnorm = float(f.norm2()) ** 0.5
    rows, prev = [], fnorm
    for m, v in enumerate(norms, start=1):
        rows.append({"box": m, "value": v, "gap": prev - v, "leakage_bound": m * err_unit * fnorm})
        prev = v
    if cfg.format == "csv":
        return _csv([{k: (repr(v) if isinstance(v, float) else v) for k, v in r.items()}
                     for r in rows]), EXIT_OK
    return _envelope(cfg, phi.n, symbol_hash=symbol_hash(phi), vector=f.to_json(),
                     decay=rows), EXIT_OK


def cmd_factorize(args, cfg):
    phi = _load_symbol(args.file)
    res = factorize(phi, cfg.eps)
    return _envelope(cfg, phi.n, symbol_hash=symbol_hash(phi),
                     factorization=res.to_json()), EXIT_OK


def cmd_decompose(args, cfg):
    obj = _load_json(args.file)
    if isinstance(obj, dict) and "rows" in obj:
        V, n, source = matrix_from_json(obj), None, {"matrix": True}
    else:
        phi = symbol_from_json(obj)
        n = phi.n
        box = _broadcast(parse_box(args.box), n, "box") if args.box else cfg.boxes(n)[0]
        V = compression(phi, box, cfg.eps).M
        source = {"symbol_hash": symbol_hash(phi), "box": list(box.d)}
    dec = hw_decompose(V, cfg.rank_tol, cfg.model_tol)
    return _envelope(cfg, n, source=source,
                     decomposition=dec.to_json(include_basis=args.include_basis)), EXIT_OK


def cmd_classify(args, cfg):
    phi = _load_symbol(args.file)
    d, D = cfg.boxes(phi.n)
    res = classify_operator(phi, d, D, cfg.eps, cfg.tol_pass, cfg.tol_fail, cfg.rank_tol,
                            cfg.model_tol)
    code = EXIT_INCONCLUSIVE if res.verdict == INCONCLUSIVE else EXIT_OK
    return _envelope(cfg, phi.n, symbol_hash=symbol_hash(phi), classification=res.to_json()), code


# ---------------------------------------------------------------- parser

CHECKS = ("unimodular", "partial-isometry", "power-pi", "hyponormal", "range-invariance",
          "commutation", "final-projection", "doubly-commuting")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("run configuration")
    g.add_argument("--config", help=f"JSON RunConfig file (default from ${CONFIG_ENV})")
    g.add_argument("--d", type=parse_box, help="inner box, e.g. 3 or 3,2")
    g.add_argument("--D", type=parse_box, help="outer box, e.g. 24 or 32,32")
    g.add_argument("--eps", type=float)
    g.add_argument("--tol-pass", type=float, dest="tol_pass")
    g.add_argument("--tol-fail", type=float, dest="tol_fail")
    g.add_argument("--rank-tol", type=float, dest="rank_tol")
    g.add_argument("--model-tol", type=float, dest="model_tol")
    g.add_argument("--grid", type=int, dest="grid_m")
    g.add_argument("--max-power", type=int, dest="max_power")
    g.add_argument("--max-m", type=int, dest="max_m")
    g.add_argument("--format", choices=("json", "csv"))
    g.add_argument("-o", "--output", help="write the report here instead of stdout")

    p = argparse.ArgumentParser(prog="polydisc-toeplitz",
                                description="Toeplitz operators on the Hardy space of the polydisc.")
    sub = p.add_subparsers(dest="command", required=True)

    sym = sub.add_parser("symbol", help="symbol utilities")
    symsub = sym.add_subparsers(dest="action", required=True)
    v = symsub.add_parser("validate", parents=[common], help="parse and summarize a symbol file")
    v.add_argument("file")
    v.set_defaults(func=cmd_symbol_validate)

    m = sub.add_parser("matrix", parents=[common], help="dense compression on a degree box")
    m.add_argument("file")
    m.add_argument("--box", help="degree box (defaults to --d)")
    m.set_defaults(func=cmd_matrix)

    c = sub.add_parser("check", parents=[common], help="run a checker")
    c.add_argument("name", choices=CHECKS)
    c.add_argument("files", nargs="+")
    c.add_argument("--box", help="box for doubly-commuting (defaults to --d)")
    c.add_argument("--guard", type=int, default=1)
    c.add_argument("--jobs", type=int, default=1, help="check several files concurrently")
    c.set_defaults(func=cmd_check)

    nm = sub.add_parser("norm", parents=[common], help="compression norms over a box sweep")
    nm.add_argument("file")
    nm.add_argument("--box-sweep", required=True, help="e.g. 4,8,16 or 4x2,8x4")
    nm.set_defaults(func=cmd_norm)

    dc = sub.add_parser("decay", parents=[common], help="norms of T^{*m} f for analytic symbols")
    dc.add_argument("file")
    dc.add_argument("--vector", default="1",
                    help='polynomial f: literal constant, JSON {"terms": [...]}, or a file')
    dc.set_defaults(func=cmd_decay)

    f = sub.add_parser("factorize", parents=[common], help="inner factorization")
    f.add_argument("file")
    f.set_defaults(func=cmd_factorize)

    de = sub.add_parser("decompose", parents=[common], help="unitary part plus truncated shifts")
    de.add_argument("file", help="matrix JSON or symbol JSON")
    de.add_argument("--box", help="compression box for symbol input (defaults to --d)")
    de.add_argument("--include-basis", action="store_true")
    de.set_defaults(func=cmd_decompose)

    cl = sub.add_parser("classify", parents=[common], help="shift / co-shift / truncated shifts")
    cl.add_argument("file")
    cl.set_defaults(func=cmd_classify)
    return p


def resolve_config(args) -> RunConfig:
    """Defaults, then the environment config file, then --config, then flags."""
    merged = {}
    for path in (os.environ.get(CONFIG_ENV), args.config):
        if path:
            obj = _load_json(path)
            RunConfig.from_json(obj)  # validate each layer on its own
            merged.update(obj)
    cfg = RunConfig.from_json(merged)
    overrides = {name: getattr(args, name) for name in
                 ("d", "D", "eps", "tol_pass", "tol_fail", "rank_tol", "model_tol", "grid_m",
                  "max_power", "max_m", "format", "output")
                 if getattr(args, name, None) is not None}
    return replace(cfg, **overrides)


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        out, code = args.func(args, cfg)
        text = out if isinstance(out, str) else _dumps(out)
        if cfg.output:
            with open(cfg.output, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return code
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except (InvalidInput, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ToeplitzError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


def main() -> None:
    sys.exit(run())


__all__ = ["RunConfig", "run", "main", "build_parser", "resolve_config", "CONFIG_ENV"]
