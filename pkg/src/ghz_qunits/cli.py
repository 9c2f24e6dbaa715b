"""Command line front end.

    ghz-qunits correlate --config cfg.json
    ghz-qunits correlate --setting 0,1/6,1/3 --setting 0,1/6,1/3 --setting 0,0,0
    ghz-qunits paradox 3
    ghz-qunits scan 3 25 --format table
    ghz-qunits lhv constraints.json
    ghz-qunits selftest --seed 7

Phases are exact turn fractions: ``"1/6"`` is a sixth of a full circle
(pi/3 radians).  Exit codes: 0 success, 2 input error, 3 internal invariant
violation.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from typing import Any, Sequence

from . import lhv, paradox, quantum
from .angles import BellValue, Turn
from .errors import CapExceededError, SolverMismatchError
from .quantum import ExperimentConfig

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_INTERNAL = 3


class InputError(Exception):
    """Malformed user input; reported with exit code 2."""


class InvariantError(Exception):
    """A library cross-check failed; reported with exit code 3."""


# -- serialization ---------------------------------------------------------


def fmt_real(x: float) -> float:
    # 12 significant digits; sub-1e-13 float noise prints as 0
    if abs(x) < 1e-13:
        return 0.0
    return float(f"{x:.12g}")


def complex_json(z: complex, order: int, exact: BellValue | None = None) -> dict:
    return {
        "re": fmt_real(z.real),
        "im": fmt_real(z.imag),
        "exact_exponent": None if exact is None else exact.exponent,
        "order": order,
    }


def bell_json(b: BellValue) -> dict:
    return complex_json(b.value, b.order, b)


def _fail(where: str, msg: str):
    raise InputError(f"{where}: {msg}")


def parse_config(data: Any, where: str = "config") -> ExperimentConfig:
    """Validate a config document field by field."""
    if not isinstance(data, dict):
        _fail(where, "expected a JSON object")
    for key in ("dim", "parties", "settings"):
        if key not in data:
            _fail(where, f"missing field {key!r}")
    dim, parties, settings = data["dim"], data["parties"], data["settings"]
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        _fail(f"{where}.dim", f"expected a positive integer, got {dim!r}")
    if not isinstance(parties, int) or isinstance(parties, bool) or parties < 1:
        _fail(f"{where}.parties", f"expected a positive integer, got {parties!r}")
    if not isinstance(settings, list) or len(settings) != parties:
        _fail(f"{where}.settings", f"expected a list of {parties} phase lists")
    turns = []
    for l, row in enumerate(settings):
        if not isinstance(row, list) or len(row) != dim:
            _fail(f"{where}.settings[{l}]", f"expected a list of {dim} turn fractions")
        parsed = []
        for m, text in enumerate(row):
            if not isinstance(text, str):
                _fail(f"{where}.settings[{l}][{m}]", f'expected a "p/q" string, got {text!r}')
            try:
                parsed.append(Turn.parse(text))
            except (ValueError, ZeroDivisionError, OverflowError) as exc:
                _fail(f"{where}.settings[{l}][{m}]", str(exc))
        turns.append(tuple(parsed))
    return ExperimentConfig(dim, parties, tuple(turns))


def parse_constraint_file(data: Any) -> dict:
    where = "constraints"
    if not isinstance(data, dict):
        _fail(where, "expected a JSON object")
    for key in ("dim", "parties", "constraints"):
        if key not in data:
            _fail(where, f"missing field {key!r}")
    dim, parties = data["dim"], data["parties"]
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 2:
        _fail(f"{where}.dim", f"expected an integer >= 2, got {dim!r}")
    if not isinstance(parties, int) or isinstance(parties, bool) or parties < 1:
        _fail(f"{where}.parties", f"expected a positive integer, got {parties!r}")
    menu = data.get("menu")
    if menu is not None and (
        not isinstance(menu, list) or not menu or not all(isinstance(s, str) for s in menu)
        or len(set(menu)) != len(menu)
    ):
        _fail(f"{where}.menu", "expected a nonempty list of distinct labels")
    raw = data["constraints"]
    if not isinstance(raw, list):
        _fail(f"{where}.constraints", "expected a list")
    constraints = []
    for i, c in enumerate(raw):
        at = f"{where}.constraints[{i}]"
        if not isinstance(c, dict) or "choice" not in c or "exponent" not in c:
            _fail(at, 'expected {"choice": [...], "exponent": e}')
        choice, e = c["choice"], c["exponent"]
        if not isinstance(choice, list) or len(choice) != parties:
            _fail(f"{at}.choice", f"expected {parties} labels")
        if menu is not None and any(s not in menu for s in choice):
            _fail(f"{at}.choice", f"label not in menu {menu}")
        if not isinstance(e, int) or isinstance(e, bool):
            _fail(f"{at}.exponent", f"expected an integer, got {e!r}")
        constraints.append(lhv.ProductConstraint(tuple(choice), e))
    probe = data.get("probe")
    if probe is not None:
        if not isinstance(probe, list) or len(probe) != parties:
            _fail(f"{where}.probe", f"expected {parties} labels")
        if menu is not None and any(s not in menu for s in probe):
            _fail(f"{where}.probe", f"label not in menu {menu}")
    if menu is None:
        try:
            menu = list(lhv._infer_menu(constraints, probe))
        except ValueError as exc:
            _fail(f"{where}.menu", str(exc))
    return {"dim": dim, "parties": parties, "menu": menu,
            "constraints": constraints, "probe": probe}


def _load_json(path: str, what: str) -> Any:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"{what} {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(
            f"{what} {path}: line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from None


# -- commands --------------------------------------------------------------


def _config_from_args(args) -> ExperimentConfig:
    if args.config and args.setting:
        raise InputError("give either --config or --setting, not both")
    if args.config:
        return parse_config(_load_json(args.config, "config"))
    if not args.setting:
        raise InputError("no experiment given: use --config FILE or --setting p/q,... per party")
    rows = [[s.strip() for s in text.split(",")] for text in args.setting]
    data = {"dim": len(rows[0]), "parties": len(rows), "settings": rows}
    if args.dim is not None:
        data["dim"] = args.dim
    return parse_config(data, where="--setting")


def cmd_correlate(args) -> dict:
    config = _config_from_args(args)
    n = config.dim
    perfect = quantum.perfect_correlation_value(config)
    outputs: dict[str, Any] = {
        "correlation_closed": complex_json(quantum.correlation_closed(config), n, perfect),
        "perfect_correlation": None if perfect is None else {
            "exponent": perfect.exponent, "order": n,
        },
    }
    try:
        direct = quantum.correlation_direct(config, cap=args.cap)
        dist = quantum.outcome_distribution(config, cap=args.cap)
    except CapExceededError as exc:
        outputs["correlation_direct"] = None
        outputs["distribution"] = None
        outputs["omitted"] = f"brute-force outputs omitted: {exc}"
    else:
        outputs["correlation_direct"] = complex_json(direct, n, perfect)
        outputs["distribution"] = [
            {"outcome": list(k), "probability": fmt_real(p)} for k, p in dist
        ]
        if abs(direct - quantum.correlation_closed(config)) > 1e-9:
            raise InvariantError("direct and closed-form correlations disagree")
    return {"inputs": {"config": config.to_dict()}, "outputs": outputs}


def _certificate_json(cert: paradox.ParadoxCertificate) -> dict:
    n = cert.dim
    return {
        "dim": n,
        "parity": cert.parity,
        "constraint_configs": [c.to_dict() for c in cert.constraint_configs],
        "baseline_config": cert.baseline_config.to_dict(),
        "probe_config": cert.probe_config.to_dict(),
        "constraint_value": bell_json(cert.constraint_value),
        "lhv_forced_value": bell_json(cert.lhv_forced_value),
        "quantum_probe_value": complex_json(cert.quantum_probe_value, n),
        "discrepancy": fmt_real(cert.discrepancy),
    }


def _check_n(n: int) -> None:
    if n < 3:
        raise InputError(
            f"n={n}: at least three observers are required; with two observers "
            "no GHZ paradox follows from perfect correlations"
        )


def cmd_paradox(args) -> dict:
    _check_n(args.n)
    cert = paradox.build_certificate(args.n, cap=args.cap)
    if not cert.discrepancy > 0 or not cert.verify():
        raise InvariantError(f"n={args.n}: certificate does not verify")
    return {"inputs": {"n": args.n}, "outputs": {"certificate": _certificate_json(cert)}}


def cmd_scan(args) -> dict:
    lo, hi = args.n_min, args.n_max
    if not 3 <= lo <= hi <= paradox.SCAN_MAX:
        raise InputError(f"need 3 <= n_min <= n_max <= {paradox.SCAN_MAX}, got {lo}, {hi}")
    rows = paradox.scan(lo, hi, cap=args.cap)
    return {
        "inputs": {"n_min": lo, "n_max": hi},
        "outputs": {"rows": [
            {
                "n": r.n,
                "parity": r.parity,
                "constraint_value": bell_json(r.constraint_value),
                "lhv_forced_value": bell_json(r.lhv_forced_value),
                "quantum_probe_value": complex_json(r.quantum_probe_value, r.n),
                "discrepancy": fmt_real(r.discrepancy),
            }
            for r in rows
        ]},
    }


def cmd_lhv(args) -> dict:
    spec = parse_constraint_file(_load_json(args.constraints, "constraint file"))
    if args.probe:
        probe = [s.strip() for s in args.probe.split(",")]
        if len(probe) != spec["parties"] or any(s not in spec["menu"] for s in probe):
            raise InputError(f"--probe: expected {spec['parties']} labels from {spec['menu']}")
        spec["probe"] = probe
    dim, parties, menu = spec["dim"], spec["parties"], spec["menu"]
    system = lhv.to_congruences(dim, parties, spec["constraints"], menu)
    solution = lhv.solve_congruences(system)
    outputs: dict[str, Any] = {
        "status": solution.status,
        "count": solution.count,
        "particular": None if solution.particular is None
        else [list(r) for r in solution.particular.assignments],
        "kernel_basis": [list(k) for k in solution.kernel_basis],
    }
    cap = lhv.ENUMERATION_CAP if args.cap is None else args.cap
    if dim ** system.n_vars <= cap:
        brute = lhv.count_consistent(dim, parties, spec["constraints"], menu, cap=cap)
        if brute != solution.count:
            raise SolverMismatchError(f"solver count {solution.count} vs enumeration {brute}")
        outputs["enumeration_count"] = brute
    else:
        outputs["enumeration_count"] = None
    if spec["probe"] is not None:
        vals = lhv.achievable_values(dim, parties, spec["constraints"], spec["probe"], menu, cap=cap)
        outputs["achievable"] = sorted(b.exponent for b in vals)
    inputs = {
        "dim": dim, "parties": parties, "menu": menu,
        "constraints": [{"choice": list(c.choice), "exponent": c.exponent}
                        for c in spec["constraints"]],
        "probe": spec["probe"],
    }
    return {"inputs": inputs, "outputs": outputs}


def _random_config(rng: random.Random, max_dim=5, max_parties=5) -> ExperimentConfig:
    n, m = rng.randint(2, max_dim), rng.randint(1, max_parties)
    den = rng.choice([1, 2, 3, 4, 5, 6, 8, 12, 60])
    return ExperimentConfig(
        n, m, tuple(tuple(Turn(rng.randrange(den), den) for _ in range(n)) for _ in range(m))
    )


def _random_constraints(rng: random.Random, n: int, m: int, menu: Sequence[str]):
    return [
        lhv.ProductConstraint(tuple(rng.choice(menu) for _ in range(m)), rng.randrange(n))
        for _ in range(rng.randint(0, 4))
    ]


def cmd_selftest(args) -> dict:
    rng = random.Random(args.seed)
    failures = []
    for i in range(args.cases):
        cfg = _random_config(rng)
        d, c = quantum.correlation_direct(cfg), quantum.correlation_closed(cfg)
        if abs(d - c) > 1e-9:
            failures.append(f"correlation case {i}: direct {d} vs closed {c}")
    menu = ("a", "b")
    for i in range(args.cases):
        n, m = rng.randint(2, 4), rng.randint(2, 3)
        cons = _random_constraints(rng, n, m, menu)
        probe = tuple(rng.choice(menu) for _ in range(m))
        sol = lhv.solve_congruences(lhv.to_congruences(n, m, cons, menu))
        brute = lhv.count_consistent(n, m, cons, menu)
        if sol.count != brute:
            failures.append(f"lhv case {i}: solver {sol.count} vs enumeration {brute}")
        lhv.achievable_values(n, m, cons, probe, menu)  # raises on mismatch
    if failures:
        raise InvariantError("; ".join(failures[:5]))
    return {
        "inputs": {"seed": args.seed, "cases": args.cases},
        "outputs": {"correlation_cases": args.cases, "lhv_cases": args.cases, "failures": 0},
    }


# -- table rendering -------------------------------------------------------


def _cnum(d: dict | None) -> str:
    if d is None:
        return "-"
    s = f"{d['re']:.6f}{d['im']:+.6f}i"
    if d.get("exact_exponent") is not None:
        s += f"  (gamma_{d['order']}^{d['exact_exponent']})"
    return s


def render_table(headers: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    cells = [[str(h) for h in headers]] + [[str(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(headers))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)


def to_table(command: str, report: dict) -> str:
    out = report["outputs"]
    if command == "correlate":
        cfg = report["inputs"]["config"]
        parts = [render_table(
            ["party", "phases (turns)"],
            [[l + 1, " ".join(s)] for l, s in enumerate(cfg["settings"])],
        ), ""]
        perfect = out["perfect_correlation"]
        parts.append(render_table(["quantity", "value"], [
            ["closed form", _cnum(out["correlation_closed"])],
            ["direct sum", _cnum(out["correlation_direct"])],
            ["perfect", "no" if perfect is None else f"yes, exponent {perfect['exponent']}"],
        ]))
        if out["distribution"] is not None:
            parts += ["", render_table(
                ["outcome", "probability"],
                [[",".join(map(str, d["outcome"])), f"{d['probability']:.12g}"]
                 for d in out["distribution"]],
            )]
        if "omitted" in out:
            parts += ["", out["omitted"]]
        return "\n".join(parts)
    if command == "paradox":
        c = out["certificate"]
        return render_table(["quantity", "value"], [
            ["n", c["dim"]],
            ["parity", c["parity"]],
            ["constraint value", _cnum(c["constraint_value"])],
            ["LHV forced value", _cnum(c["lhv_forced_value"])],
            ["quantum probe value", _cnum(c["quantum_probe_value"])],
            ["discrepancy", f"{c['discrepancy']:.12g}"],
        ])
    if command == "scan":
        return render_table(
            ["n", "parity", "constraint value", "quantum probe value", "discrepancy"],
            [[r["n"], r["parity"], _cnum(r["constraint_value"]),
              _cnum(r["quantum_probe_value"]), f"{r['discrepancy']:.12g}"]
             for r in out["rows"]],
        )
    if command == "lhv":
        rows = [["status", out["status"]], ["solutions", out["count"]],
                ["enumeration count", "-" if out["enumeration_count"] is None
                 else out["enumeration_count"]]]
        if "achievable" in out:
            rows.append(["achievable exponents", " ".join(map(str, out["achievable"])) or "none"])
        return render_table(["quantity", "value"], rows)
    return render_table(["quantity", "value"], [[k, v] for k, v in out.items()])


# -- entry point -----------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "table"), default="json")
    common.add_argument("--out", metavar="PATH", help="write the report here instead of stdout")
    common.add_argument("--cap", type=int, default=None, help="enumeration cap override")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--timing", action="store_true",
                        help="include wall time in the JSON report (breaks byte-identity)")

    parser = argparse.ArgumentParser(prog="ghz-qunits", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("correlate", parents=[common], help="correlation of one experiment")
    p.add_argument("--config", metavar="FILE")
    p.add_argument("--setting", action="append", metavar="P/Q,...",
                   help="comma-separated phases of one party; repeat per party")
    p.add_argument("--dim", type=int, default=None)
    p.set_defaults(func=cmd_correlate)

    p = sub.add_parser("paradox", parents=[common], help="certificate for N parties")
    p.add_argument("n", type=int)
    p.set_defaults(func=cmd_paradox)

    p = sub.add_parser("scan", parents=[common], help="certificates for a range of N")
    p.add_argument("n_min", type=int)
    p.add_argument("n_max", type=int)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("lhv", parents=[common], help="solve an LHV constraint file")
    p.add_argument("constraints", metavar="FILE")
    p.add_argument("--probe", default=None, help="comma-separated labels, overrides the file")
    p.set_defaults(func=cmd_lhv)

    p = sub.add_parser("selftest", parents=[common], help="randomized cross-checks")
    p.add_argument("--cases", type=int, default=100)
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    args = parser.parse_args(argv)  # argparse exits with 2 on bad flags
    t0 = time.perf_counter()
    try:
        report = args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ValueError, OverflowError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # InvariantError, SolverMismatchError, or a bug
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    elapsed_ms = (time.perf_counter() - t0) * 1000
    report = {"command": args.command, "argv": argv, **report}
    if args.timing:
        report["timing_ms"] = round(elapsed_ms, 3)

    if args.format == "json":
        text = json.dumps(report, indent=2, sort_keys=False) + "\n"
    else:
        text = to_table(args.command, report) + f"\n\n({elapsed_ms:.1f} ms)\n"
    if args.out:
        try:
            with open(args.out, "w") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"error: --out {args.out}: {exc.strerror}", file=sys.stderr)
            return EXIT_INPUT
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
