"""Command-line front end.

Each subcommand reads one JSON instance document, runs one operation and
prints a deterministic report: JSON with sorted keys, or CSV whose columns
are listed in ``--help``.  Floats are printed as shortest round-trip
decimals.  Exit codes: 0 success, 1 input or configuration error, 2 a
checked invariant failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path
from typing import Any, Callable

from .contraction import (
    AffineMapSet,
    certify_joint_contraction,
    divergence_witness,
    iterate_composition,
    lipschitz_functional,
)
from .errors import ConfigError, InvariantViolation, SubfeketeError
from .extremal import SURVIVOR_CAP, max_min_rate, survivors, threshold_bisect
from .fekete import bounds_report, check_submultiplicative
from .functional import Functional, ScalarFunctional
from .matrix_jsr import (
    MatrixSet,
    check_all_products_contract,
    jsr_bounds,
    matrix_functional,
    reproduce_remark_example,
)
from .turing import TuringMachine, max_speed_bounds
from .words import MAX_WORD_LENGTH, Alphabet, Subshift, format_word, parse_word

KINDS = ("matrix", "affine", "turing", "scalar")

CSV_COLUMNS = {
    "bounds": ["n", "phi_n", "root", "running_upper", "argmax_word"],
    "extremal": ["k", "symbol", "prefix_value", "prefix_rate", "t_n"],
    "survivors": ["word"],
    "jsr": ["n", "phi_n", "root", "running_upper", "argmax_word", "certified_lower", "lower_word"],
    "contract-cert": ["status", "M", "worst_word", "worst_norm"],
    "zero-convergence": ["status", "n", "worst_word", "worst_norm"],
    "tm-speed": ["n", "S_n", "speed", "best", "exact"],
    "check-submult": ["u", "v", "eval_uv", "product"],
    "paper-example": ["item", "computed", "claimed", "status", "note"],
}

EPILOG = "CSV columns:\n" + "\n".join(
    f"  {cmd:17s} {','.join(cols)}" for cmd, cols in CSV_COLUMNS.items()
) + """

Config documents (JSON):
  {"kind": "matrix", "matrices": [[[row], ...], ...], "norm": "spectral|frobenius|one|inf",
   "forbidden": ["11"], "periods": ["01"], "period_len_max": 4}
  {"kind": "affine", "maps": [{"linear": [[...]], "offset": [...]}], "forbidden": [...],
   "flow": "1", "x0": [0.0]}
  {"kind": "turing", "states": 2, "symbols": 2,
   "transitions": [[state, read, write, "L|R", next], ...], "halt": [[state, read], ...],
   "window": 1, "len_budget": 8, "beam_width": 16}
  {"kind": "scalar", "weights": [3.0]}
"""


class Instance:
    def __init__(self, doc: dict):
        kind = doc.get("kind")
        if kind not in KINDS:
            raise ConfigError(f"config 'kind' must be one of {KINDS}, got {kind!r}")
        self.kind = kind
        self.doc = doc
        self.matrices: MatrixSet | None = None
        self.maps: AffineMapSet | None = None
        self.machine: TuringMachine | None = None
        self.functional: Functional | None = None
        try:
            if kind == "matrix":
                self.matrices = MatrixSet.from_lists(doc["matrices"], doc.get("norm", "spectral"))
                self.functional = matrix_functional(self.matrices)
            elif kind == "affine":
                self.maps = AffineMapSet.from_pairs(
                    (m["linear"], m["offset"]) for m in doc["maps"]
                )
                self.functional = lipschitz_functional(self.maps)
            elif kind == "scalar":
                self.functional = ScalarFunctional(doc["weights"])
            else:
                self.machine = TuringMachine.from_rows(
                    int(doc["states"]),
                    int(doc["symbols"]),
                    doc["transitions"],
                    doc.get("halt", ()),
                    int(doc.get("start", 0)),
                )
        except KeyError as exc:
            raise ConfigError(f"config is missing field {exc.args[0]!r}") from None
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"malformed {kind} config: {exc}") from None

    @property
    def alphabet(self) -> Alphabet:
        return self.need_functional().alphabet

    def need_functional(self) -> Functional:
        if self.functional is None:
            raise ConfigError(f"this command needs a word functional, not a {self.kind} instance")
        return self.functional

    def need(self, attr: str, kind: str):
        value = getattr(self, attr)
        if value is None:
            raise ConfigError(f"this command needs a {kind} instance, got {self.kind}")
        return value

    def subshift(self, extra: list[str]) -> Subshift | None:
        words = list(self.doc.get("forbidden", [])) + extra
        if not words:
            return None
        return Subshift.from_strings(self.alphabet, words)


def _load(path: str | None) -> Instance:
    if path is None:
        raise ConfigError("--config is required for this command")
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    return Instance(doc)


def _capped(name: str, value: int | None, default: int) -> int:
    v = default if value is None else value
    if not 1 <= v <= MAX_WORD_LENGTH:
        raise ConfigError(f"{name} must be in 1..{MAX_WORD_LENGTH}, got {v}")
    return v


def _forbid(args) -> list[str]:
    if not args.forbid:
        return []
    return [w for w in args.forbid.split(",") if w]


def cmd_bounds(args, inst: Instance) -> dict:
    f = inst.need_functional()
    n_max = _capped("--n-max", args.n_max, 8)
    periods = [parse_word(p) for p in inst.doc.get("periods", [])]
    rep = bounds_report(f, n_max, inst.subshift(_forbid(args)), periods, workers=args.workers)
    ups = [r.running_upper for r in rep.records]
    if any(b > a for a, b in zip(ups, ups[1:])):
        raise InvariantViolation("running upper bound increased")
    return rep.to_dict()


def cmd_extremal(args, inst: Instance) -> dict:
    f = inst.need_functional()
    depth = _capped("--depth", args.depth, 8)
    sub = inst.subshift(_forbid(args))
    cert = max_min_rate(f, depth, sub, workers=args.workers)
    out = cert.to_dict()
    if args.tol is not None:
        phi_1 = max(f.eval((s,)) for s in range(f.size) if sub is None or sub.allows((s,)))
        lo, hi = threshold_bisect(f, depth, sub, 1e-300, phi_1 * (1 + 1e-6), args.tol)
        if not (lo - args.tol <= cert.t_n <= hi + args.tol):
            raise InvariantViolation(f"bisection bracket [{lo}, {hi}] misses t_n={cert.t_n}")
        out["bisect"] = {"lo": lo, "hi": hi, "tol": args.tol}
    return out


def cmd_survivors(args, inst: Instance) -> dict:
    f = inst.need_functional()
    depth = _capped("--depth", args.depth, 8)
    if args.threshold is None or not args.threshold > 0:
        raise ConfigError("--threshold must be a positive number")
    return survivors(f, args.threshold, depth, inst.subshift(_forbid(args)), SURVIVOR_CAP).to_dict()


def cmd_jsr(args, inst: Instance) -> dict:
    ms = inst.need("matrices", "matrix")
    n_max = _capped("--n-max", args.n_max, 8)
    period = _capped(
        "period length", args.depth, int(inst.doc.get("period_len_max", min(n_max, 4)))
    )
    rep = jsr_bounds(ms, n_max, period, inst.subshift(_forbid(args)), workers=args.workers)
    if rep.certified_lower > rep.running_upper + 1e-9:
        raise InvariantViolation(
            f"certified lower {rep.certified_lower} exceeds upper {rep.running_upper}"
        )
    return rep.to_dict()


def cmd_contract_cert(args, inst: Instance) -> dict:
    maps = inst.need("maps", "affine")
    m_max = _capped("--n-max", args.n_max, 8)
    sub = inst.subshift(_forbid(args))
    out = {"certificate": certify_joint_contraction(maps, m_max, sub).to_dict()}
    depth = _capped("--depth", args.depth, m_max)
    out["divergence"] = divergence_witness(maps, depth, sub, workers=args.workers).to_dict()
    if "flow" in inst.doc and "x0" in inst.doc:
        traj = iterate_composition(maps, parse_word(inst.doc["flow"]), inst.doc["x0"], m_max)
        out["trajectory"] = [[float(v) for v in x] for x in traj]
    return out


def cmd_zero_convergence(args, inst: Instance) -> dict:
    ms = inst.need("matrices", "matrix")
    n_max = _capped("--n-max", args.n_max, 8)
    return check_all_products_contract(ms, n_max, inst.subshift(_forbid(args))).to_dict()


def cmd_tm_speed(args, inst: Instance) -> dict:
    m = inst.need("machine", "turing")
    n_max = _capped("--n-max", args.n_max, 8)
    doc = inst.doc
    rep = max_speed_bounds(
        m,
        n_max,
        args.mode or "config",
        window=doc.get("window"),
        len_budget=doc.get("len_budget"),
        beam_width=doc.get("beam_width"),
    )
    if any(r.s_n > r.n + 1 for r in rep.records):
        raise InvariantViolation("a cells-visited count exceeds n + 1")
    return rep.to_dict()


def cmd_check_submult(args, inst: Instance) -> dict:
    f = inst.need_functional()
    n_max = _capped("--n-max", args.n_max, 6)
    found = check_submultiplicative(f, n_max, inst.subshift(_forbid(args)))
    return {
        "n_max": n_max,
        "violations": [
            {"u": format_word(v.u), "v": format_word(v.v), "eval_uv": v.eval_uv, "product": v.product}
            for v in found
        ],
    }


def cmd_paper_example(args, inst: Instance | None) -> dict:
    return reproduce_remark_example().to_dict()


COMMANDS: dict[str, Callable[[Any, Any], dict]] = {
    "bounds": cmd_bounds,
    "extremal": cmd_extremal,
    "survivors": cmd_survivors,
    "jsr": cmd_jsr,
    "contract-cert": cmd_contract_cert,
    "zero-convergence": cmd_zero_convergence,
    "tm-speed": cmd_tm_speed,
    "check-submult": cmd_check_submult,
    "paper-example": cmd_paper_example,
}


def _csv_rows(command: str, result: dict) -> list[list]:
    if command == "bounds":
        return [[r[c] for c in CSV_COLUMNS["bounds"]] for r in result["records"]]
    if command == "extremal":
        rows = []
        for k, v in enumerate(result["per_prefix_values"], start=1):
            rows.append([k, result["witness"][k - 1], v, v ** (1.0 / k), result["t_n"]])
        return rows
    if command == "survivors":
        return [[w] for w in result["words"]]
    if command == "jsr":
        return [
            [r[c] for c in CSV_COLUMNS["bounds"]] + [result["certified_lower"], result["lower_word"]]
            for r in result["bounds"]["records"]
        ]
    if command == "contract-cert":
        c = result["certificate"]
        if c["status"] == "CERTIFIED":
            return [["CERTIFIED", c["M"], c["worst_word"], c["max_lipschitz"]]]
        return [[c["status"], c["n"], c["worst_word"], c["worst_norm"]]]
    if command == "zero-convergence":
        return [[result[c] for c in CSV_COLUMNS["zero-convergence"]]]
    if command == "tm-speed":
        return [[r[c] for c in CSV_COLUMNS["tm-speed"]] for r in result["records"]]
    if command == "check-submult":
        return [[v[c] for c in CSV_COLUMNS["check-submult"]] for v in result["violations"]]
    return [[ln[c] for c in CSV_COLUMNS["paper-example"]] for ln in result["lines"]]


def _cell(x) -> str:
    if isinstance(x, float):
        return float.__repr__(x)
    return str(x)


def render(command: str, envelope: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(envelope, sort_keys=True, indent=2, allow_nan=False) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS[command])
    for row in _csv_rows(command, envelope["result"]):
        w.writerow([_cell(x) for x in row])
    return buf.getvalue()


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="subfekete",
        description="Extremal growth rates of submultiplicative word functionals.",
        epilog=EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", metavar="PATH")
    p.add_argument("--n-max", type=int, dest="n_max")
    p.add_argument("--depth", type=int)
    p.add_argument("--forbid", metavar="WORD[,WORD...]")
    p.add_argument("--threshold", type=float)
    p.add_argument("--tol", type=float)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--mode", choices=("input", "config"))
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--seed", type=int, default=0, help="recorded in the report parameters")
    p.add_argument("--verify", metavar="REPORT", help="recompute and compare with a JSON report")
    return p


def _params(args) -> dict:
    # --workers and --verify are excluded: they must not change report bytes.
    keys = ("n_max", "depth", "forbid", "threshold", "tol", "mode", "seed")
    return {k: getattr(args, k) for k in keys if getattr(args, k) is not None}


def _execute(args) -> dict:
    if args.workers < 1:
        raise ConfigError("--workers must be >= 1")
    if args.tol is not None and not args.tol > 0:
        raise ConfigError("--tol must be positive")
    inst = None if args.command == "paper-example" else _load(args.config)
    result = COMMANDS[args.command](args, inst)
    return {
        "command": args.command,
        "config": None if inst is None else inst.doc,
        "params": _params(args),
        "result": result,
    }


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    try:
        envelope = _execute(args)
        if args.verify:
            try:
                stored = json.loads(Path(args.verify).read_text(encoding="utf-8"))
            except (OSError, json.JSONDecodeError) as exc:
                raise ConfigError(f"cannot read report {args.verify}: {exc}") from None
            fresh = json.loads(render(args.command, envelope, "json"))
            if stored != fresh:
                print(f"subfekete: {args.verify} does not match the recomputed report", file=sys.stderr)
                return 2
            sys.stdout.write("verified\n")
            return 0
        sys.stdout.write(render(args.command, envelope, args.format))
        if args.command == "check-submult" and envelope["result"]["violations"]:
            print("subfekete: submultiplicativity violated", file=sys.stderr)
            return 2
        return 0
    except InvariantViolation as exc:
        print(f"subfekete: invariant violated: {exc}", file=sys.stderr)
        return 2
    except SubfeketeError as exc:
        print(f"subfekete: {exc}", file=sys.stderr)
        return 1
