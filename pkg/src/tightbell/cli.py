"""Command-line surface: reproducible analyses, machine-readable JSON reports.

Exit codes: 0 success, 1 invalid input, 2 resource cap exceeded,
3 certification failure.  Reports are deterministic for fixed inputs and seed
except for the ``timestamp`` field.  Exact rational values are serialized as
strings ("1/2"), certified numeric values as JSON numbers; the ``provenance``
block says which is which so consumers never compare across kinds without the
declared tolerance.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from . import classical, facegeom, game, nlc, qsdp
from .errors import (
    DualInfeasible,
    GameFormatError,
    InvalidParameter,
    NotConverged,
    TightBellError,
    TooLarge,
    Truncated,
)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_CAPPED = 2
EXIT_UNCERTIFIED = 3

ENUM_BITS_WARN = 24  # matches the default pattern cap of 2^24


@dataclass(frozen=True)
class RunConfig:
    """Validated per-invocation configuration shared by the analysis commands."""

    seed: int = 0
    restarts: int = 8
    gap_tol: float = 1e-7
    feas_tol: float = 1e-8
    adv_tol: float = 1e-6
    slack_tol: float = 1e-6
    change_tol: float = 1e-13
    enum_cap: int = classical.DEFAULT_ENUM_CAP
    vertex_cap: int = classical.DEFAULT_VERTEX_CAP
    space: str = "full"
    output_path: str | None = None

    def __post_init__(self) -> None:
        tols = (self.gap_tol, self.feas_tol, self.adv_tol, self.slack_tol, self.change_tol)
        if any(t <= 0 for t in tols):
            raise InvalidParameter("tolerances must be positive")
        if self.enum_cap <= 0 or self.vertex_cap <= 0 or self.restarts <= 0:
            raise InvalidParameter("caps and restart count must be positive")
        if not 0 <= self.seed < 2**64:
            raise InvalidParameter("seed must fit in 64 unsigned bits")

    def solver(self) -> qsdp.SolveConfig:
        return qsdp.SolveConfig(
            restarts=self.restarts,
            seed=self.seed,
            gap_tol=self.gap_tol,
            feas_tol=self.feas_tol,
            adv_tol=self.adv_tol,
            change_tol=self.change_tol,
        )


def _timestamp() -> str:
    return datetime.now(timezone.utc).isoformat()


def _emit(report: dict, output: str | None) -> None:
    text = json.dumps(report, indent=2) + "\n"
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _run_config(args) -> RunConfig:
    return RunConfig(
        seed=args.seed,
        restarts=args.restarts,
        gap_tol=args.gap_tol,
        feas_tol=args.feas_tol,
        adv_tol=args.adv_tol,
        change_tol=args.change_tol,
        enum_cap=getattr(args, "enum_cap", classical.DEFAULT_ENUM_CAP),
        vertex_cap=getattr(args, "vertex_cap", classical.DEFAULT_VERTEX_CAP),
        space=getattr(args, "space", "full"),
        output_path=args.output,
    )


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("-o", "--output", help="write the JSON report here instead of stdout")


def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0, help="64-bit solver seed")
    p.add_argument("--restarts", type=int, default=8)
    p.add_argument("--gap-tol", type=float, default=1e-7, dest="gap_tol")
    p.add_argument("--feas-tol", type=float, default=1e-8, dest="feas_tol")
    p.add_argument("--adv-tol", type=float, default=1e-6, dest="adv_tol")
    p.add_argument("--change-tol", type=float, default=1e-13, dest="change_tol")


def _add_caps(p: argparse.ArgumentParser) -> None:
    p.add_argument("--enum-cap", type=int, default=classical.DEFAULT_ENUM_CAP,
                   dest="enum_cap", help="max strategy patterns to enumerate")
    p.add_argument("--vertex-cap", type=int, default=classical.DEFAULT_VERTEX_CAP,
                   dest="vertex_cap", help="max optimal vertices to store")


MAKE_NAMES = {
    "chsh": ("chsh", False),
    "identity": ("identity", True),
    "nlc-and": ("nlc_and", True),
    "appendixd": ("appendix_d", True),
    "single-entry": ("single_entry", False),
}


def cmd_make(args) -> int:
    canonical, needs_n = MAKE_NAMES[args.name]
    g = game.make_named(canonical, args.n if needs_n else None)
    if min(g.m_a, g.m_b) > ENUM_BITS_WARN:
        sys.stderr.write(
            f"warning: enumeration side has {min(g.m_a, g.m_b)} inputs, "
            f"beyond the default 2^{ENUM_BITS_WARN} pattern cap\n"
        )
    if args.output:
        game.save_game(g, args.output)
    else:
        _emit(game.game_to_dict(g), None)
    return EXIT_OK


def cmd_bias(args) -> int:
    cfg = _run_config(args)
    g = game.load_game(args.game)
    if args.kind == "classical":
        res = classical.classical_bias(g, enum_cap=cfg.enum_cap)
        report = {
            "command": "bias classical",
            "timestamp": _timestamp(),
            "m_a": g.m_a,
            "m_b": g.m_b,
            "xi_c": str(res.xi_c),
            "winning_probability": str((1 + res.xi_c) / 2),
            "witness_alpha": list(res.witness.alpha),
            "witness_beta": list(res.witness.beta),
            "num_alpha_optimal": res.num_alpha_optimal,
            "enumerated_side": "bob" if res.swapped else "alice",
            "provenance": {"xi_c": "exact-rational"},
        }
        _emit(report, cfg.output_path)
        return EXIT_OK
    res = qsdp.solve_quantum_bias(g, cfg.solver())
    report = {
        "command": "bias quantum",
        "timestamp": _timestamp(),
        "m_a": g.m_a,
        "m_b": g.m_b,
        "seed": cfg.seed,
        "restarts_used": res.restarts_used,
        "xi_c": None if res.xi_c is None else str(res.xi_c),
        **qsdp.certificate_to_dict(res),
        "provenance": {"xi_c": "exact-rational", "xi_q": "certified-numeric"},
    }
    _emit(report, cfg.output_path)
    if res.classification == qsdp.UNDECIDED:
        return EXIT_UNCERTIFIED
    return EXIT_OK


def cmd_face(args) -> int:
    cfg = _run_config(args)
    g = game.load_game(args.game)
    report = facegeom.face_report(
        g,
        enum_cap=cfg.enum_cap,
        vertex_cap=cfg.vertex_cap,
        solve_cfg=cfg.solver(),
    )
    payload = facegeom.face_report_to_dict(report)
    payload["space"] = cfg.space
    if cfg.space == "correlation":
        payload["dim"] = payload["dim_corr"]
        payload["is_facet"] = payload["is_facet_corr"]
    else:
        payload["dim"] = payload["dim_full"]
        payload["is_facet"] = payload["is_facet_full"]
    out = {"command": "face", "timestamp": _timestamp(), "seed": cfg.seed, **payload}
    out["provenance"] = {
        "xi_c": "exact-rational",
        "xi_q": "certified-numeric",
        **payload["provenance"],
    }
    _emit(out, cfg.output_path)
    if report.truncated:
        return EXIT_CAPPED
    if report.classification == qsdp.UNDECIDED:
        return EXIT_UNCERTIFIED
    return EXIT_OK


def cmd_trivial_facet(args) -> int:
    sign = {"+": 1, "+1": 1, "-": -1, "-1": -1}.get(args.sign)
    if sign is None:
        raise GameFormatError(f"sign must be + or -, got {args.sign!r}")
    rep = facegeom.trivial_facet_check(args.ma, args.mb, args.x0, args.y0, sign)
    _emit(
        {
            "command": "trivial-facet",
            "timestamp": _timestamp(),
            "m_a": args.ma,
            "m_b": args.mb,
            "x0": args.x0,
            "y0": args.y0,
            "sign": sign,
            "dim": rep.dim,
            "is_facet": rep.is_facet,
            "provenance": {"dim": "exact-integer-rank"},
        },
        args.output,
    )
    return EXIT_OK


def _load_spec(path) -> nlc.NlcSpec:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise GameFormatError(f"not valid JSON: {path}") from exc
    if isinstance(data, dict) and data.get("format") == nlc.NLC_FORMAT:
        return nlc.nlc_spec_from_dict(data)
    return nlc.spec_from_game(game.game_from_dict(data))


def cmd_nlc(args) -> int:
    if args.nlc_command == "spectrum":
        spec = _load_spec(args.file)
        a = nlc.hadamard_spectrum(spec)
        _emit(
            {
                "command": "nlc spectrum",
                "timestamp": _timestamp(),
                "n": spec.n,
                "spectrum": [str(v) for v in a.spectrum],
                "lambda_norm": str(a.lambda_norm),
                "k": a.k,
                "l": a.l,
                "xi_star": str(a.xi_star),
                "kl_dim_bound": a.kl_dim_bound,
                "provenance": {"spectrum": "exact-rational"},
            },
            args.output,
        )
        return EXIT_OK
    if args.nlc_command == "bound":
        spec = _load_spec(args.file)
        a = nlc.hadamard_spectrum(spec)
        g = nlc.build_nlc(spec)
        bound = nlc.nlc_bias_bound(a, g)
        xi_c = classical.classical_bias(g).xi_c
        _emit(
            {
                "command": "nlc bound",
                "timestamp": _timestamp(),
                "n": spec.n,
                "xi_star": str(bound.xi_star),
                "xi_c": str(xi_c),
                "matches_classical": bound.matches_classical,
                "provenance": {"xi_star": "exact-rational", "xi_c": "exact-rational"},
            },
            args.output,
        )
        return EXIT_OK
    if args.nlc_command == "g0":
        ns = range(args.n, (args.n_max or args.n) + 1)
        points = []
        for n in ns:
            try:
                d = nlc.g0_dimension(n)
                points.append({"n": n, "formula": d.formula_value, "verified": d.verified_value})
            except TooLarge:
                size = 1 << n
                points.append({"n": n, "formula": (size // 2) * (size - 3), "verified": None})
        report = {
            "command": "nlc g0",
            "timestamp": _timestamp(),
            "provenance": {"verified": "exact-integer-rank"},
        }
        if args.n_max:
            report["points"] = points
        else:
            report.update(points[0])
        _emit(report, args.output)
        return EXIT_OK
    # corollary
    ns = range(args.n, (args.n_max or args.n) + 1)
    points = [
        {
            "n": n,
            "dim_bound": nlc.corollary_bound(n).dim_bound,
            "codim_bound_full": nlc.corollary_bound(n).codim_bound_full,
            "codim_bound_corr": nlc.corollary_bound(n).codim_bound_corr,
        }
        for n in ns
    ]
    report = {"command": "nlc corollary", "timestamp": _timestamp()}
    if args.n_max:
        report["points"] = points
    else:
        report.update(points[0])
    _emit(report, args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tightbell",
        description="Exact classical and certified quantum analysis of two-player XOR games.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("make", help="write a named game file")
    p.add_argument("name", choices=sorted(MAKE_NAMES))
    p.add_argument("--n", type=int, default=None, help="family size parameter")
    _add_common(p)
    p.set_defaults(func=cmd_make)

    p = sub.add_parser("bias", help="classical (exact) or quantum (certified) bias")
    p.add_argument("kind", choices=["classical", "quantum"])
    p.add_argument("game")
    _add_solver_flags(p)
    _add_caps(p)
    _add_common(p)
    p.set_defaults(func=cmd_bias)

    p = sub.add_parser("face", help="face dimensions, bounds, and facet verdicts")
    p.add_argument("game")
    p.add_argument("--space", choices=["full", "correlation"], default="full")
    _add_solver_flags(p)
    _add_caps(p)
    _add_common(p)
    p.set_defaults(func=cmd_face)

    p = sub.add_parser("trivial-facet", help="exact check of a |c_xy| <= 1 face")
    p.add_argument("--ma", type=int, required=True)
    p.add_argument("--mb", type=int, required=True)
    p.add_argument("--x0", type=int, required=True)
    p.add_argument("--y0", type=int, required=True)
    p.add_argument("--sign", required=True, help="+ or -")
    _add_common(p)
    p.set_defaults(func=cmd_trivial_facet)

    p = sub.add_parser("nlc", help="shared-input game analyses")
    nsub = p.add_subparsers(dest="nlc_command", required=True)
    for name, needs_file in (("spectrum", True), ("bound", True)):
        np_ = nsub.add_parser(name)
        np_.add_argument("file", help="game or shared-input spec JSON")
        _add_common(np_)
        np_.set_defaults(func=cmd_nlc)
    for name in ("g0", "corollary"):
        np_ = nsub.add_parser(name)
        np_.add_argument("--n", type=int, required=True)
        np_.add_argument("--n-max", type=int, default=None, dest="n_max",
                         help="emit a points array for n..n-max")
        _add_common(np_)
        np_.set_defaults(func=cmd_nlc)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (TooLarge, Truncated) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_CAPPED
    except (NotConverged, DualInfeasible) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_UNCERTIFIED
    except (TightBellError, OSError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
