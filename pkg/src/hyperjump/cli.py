"""Command-line front end: reproducible runs over the library ops.

Three commands. `sts` builds and saves a Steiner triple system, `verify`
runs the full witness pipeline (or re-verifies an existing certificate),
and `analyze` surfaces the one-shot analysis ops individually. Every
command prints a plain-text table followed by a report JSON block; exit
codes are 0 for success/VALID, 1 for domain or verification failure, 2
for usage errors.

All randomness flows from one root seed through named streams (one per
module.op), so reruns with the same flags are byte-identical apart from
timestamps, which live outside the hashed content.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import cone as cone_mod
from . import designs, witness
from .core import load_3g, save_3g
from .errors import DomainError, HyperjumpError
from .lagrangian import (
    GRID_VERTEX_CAP,
    WeightVector,
    grid_oracle,
    maximize_lagrangian,
)


@dataclass
class RunConfig:
    seed: int = 0
    numeric_tol: float = 1e-9
    gradient_tol: float = 1e-6
    brute_vertices: int = 12
    grid_steps: int = 300
    restarts: int = 200
    output_dir: str = "."

    def __post_init__(self):
        if self.numeric_tol <= 0 or self.gradient_tol <= 0:
            raise DomainError("tolerances must be positive")
        if min(self.brute_vertices, self.grid_steps, self.restarts) < 1:
            raise DomainError("caps must be at least 1")


_CONFIG_FIELDS = {
    "seed": int,
    "numeric_tol": float,
    "gradient_tol": float,
    "brute_vertices": int,
    "grid_steps": int,
    "restarts": int,
    "output_dir": str,
}


def load_config(path) -> RunConfig:
    """Parse a key = value config file (# comments, blank lines ignored)."""
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DomainError(f"{path}:{lineno}: expected key = value")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in _CONFIG_FIELDS:
            raise DomainError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = _CONFIG_FIELDS[key](value.strip())
    return RunConfig(**values)


def stream_seed(root: int, name: str) -> int:
    """Deterministic per-op seed derived from the root seed."""
    digest = hashlib.sha256(f"{root}:{name}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def _number(text: str):
    """Exact Fraction for '2/3'-style or integer input, float otherwise."""
    text = text.strip()
    if "/" in text or text.lstrip("+-").isdigit():
        return Fraction(text)
    return float(text)


def _weights_arg(text: str) -> WeightVector:
    parts = [Fraction(p.strip()) for p in text.split(",")]
    return WeightVector(tuple(parts))


def _print_table(rows) -> None:
    width = max(len(k) for k, _ in rows)
    for key, value in rows:
        print(f"  {key:<{width}}  {value}")


def _emit(report: dict, out: str | None) -> None:
    text = json.dumps(report, indent=2, default=str)
    print("--- report ---")
    print(text)
    if out:
        Path(out).write_text(text + "\n")


def _resolve(args, name: str, fallback):
    flag = getattr(args, name, None)
    return flag if flag is not None else fallback


def _apply_thread_cap() -> None:
    value = os.environ.get("HYPERJUMP_THREADS")
    if not value:
        return
    try:
        cap = max(1, int(value))
    except ValueError:
        print(f"warning: HYPERJUMP_THREADS={value!r} ignored", file=sys.stderr)
        return
    import numba

    numba.set_num_threads(min(cap, numba.config.NUMBA_NUM_THREADS))


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_sts(args, cfg: RunConfig) -> int:
    system = designs.build_sts(args.t, args.method)
    rows = [
        ("t", system.t),
        ("method", system.construction_tag),
        ("triples", len(system.triples)),
    ]
    if args.out:
        save_3g(system.graph(), args.out,
                comments=(f"sts t={system.t} method={system.construction_tag}",))
        rows.append(("out", args.out))
    _print_table(rows)
    _emit({
        "op": "sts",
        "inputs": {"t": args.t, "method": system.construction_tag},
        "triples": len(system.triples),
        "seed": cfg.seed,
    }, None)
    return 0


def cmd_verify(args, cfg: RunConfig) -> int:
    if args.input is None and args.t is None:
        print("error: verify needs --t (build) or --in (re-check)", file=sys.stderr)
        return 2
    if args.input:
        report = witness.reverify_certificate(args.input, deep=args.deep)
        _print_table([
            ("certificate", args.input),
            ("hash_ok", report.hash_ok),
            ("arithmetic_ok", report.arithmetic_ok),
            ("deep_ok", report.deep_ok),
        ])
        _emit({
            "op": "verify",
            "inputs": {"in": args.input, "deep": args.deep},
            "hash_ok": report.hash_ok,
            "arithmetic_ok": report.arithmetic_ok,
            "deep_ok": report.deep_ok,
            "seed": cfg.seed,
        }, None)
        return 0 if report.ok else 1
    seed = stream_seed(cfg.seed, "witness.assemble")
    restarts = _resolve(args, "restarts", 48)
    cg, cert = witness.assemble_witness(
        args.t, args.m, seed=seed, policy=args.policy,
        restarts=restarts, spot_checks=args.spot_checks,
    )
    cert.seeds["root"] = cfg.seed
    rows = [
        ("t", cert.t),
        ("m", cert.m),
        ("status", cert.status),
        ("lower_bound", cert.lower_bound),
        ("target", cert.lower_bound_exceeds),
        ("margin", cert.lower_bound - cert.lower_bound_exceeds),
        ("subgraphs", f"{cert.subgraphs_checked} ({cert.subgraph_policy})"),
        ("failures", len(cert.failures)),
        ("graph_hash", cert.graph_hash[:16] + "..."),
    ]
    _print_table(rows)
    if args.out:
        witness.emit_certificate(cert, args.out)
        print(f"  certificate written to {args.out}")
    else:
        print("--- report ---")
        print(json.dumps(cert.to_content(), indent=2))
    return 0 if cert.status == "VALID" else 1


def _analyze_tau(args, cfg: RunConfig) -> tuple[dict, list, int]:
    value = cone_mod.tau(_number(args.rho))
    rows = [("rho", args.rho), ("tau", value)]
    return {"op": "tau", "inputs": {"rho": args.rho}, "value": str(value),
            "seed": cfg.seed}, rows, 0


def _analyze_phi(args, cfg: RunConfig) -> tuple[dict, list, int]:
    value = cone_mod.phi(float(args.b), float(args.q), float(args.rho))
    rows = [("b", args.b), ("q", args.q), ("rho", args.rho), ("phi", value)]
    return {"op": "phi",
            "inputs": {"b": args.b, "q": args.q, "rho": args.rho},
            "value": value, "seed": cfg.seed}, rows, 0


def _analyze_apex_opt(args, cfg: RunConfig) -> tuple[dict, list, int]:
    b_star, value = cone_mod.apex_optimum(float(args.q), float(args.rho))
    rows = [("q", args.q), ("rho", args.rho), ("b_star", b_star), ("value", value)]
    return {"op": "apex-opt", "inputs": {"q": args.q, "rho": args.rho},
            "b_star": b_star, "value": value, "seed": cfg.seed}, rows, 0


def _analyze_tau_sweep(args, cfg: RunConfig) -> tuple[dict, list, int]:
    seed = stream_seed(cfg.seed, "cone.check_tau_threshold")
    grid = _resolve(args, "grid_steps", 10_000)
    report = cone_mod.check_tau_threshold(args.samples, seed, grid)
    rows = [
        ("samples", report.samples),
        ("grid", report.grid_resolution),
        ("worst_phi_margin", f"{report.worst_phi_margin:.3e}"),
        ("worst_apex_gap", f"{report.worst_apex_gap:.3e}"),
        ("violations", len(report.violations)),
    ]
    payload = report.to_json()
    payload["seed"] = cfg.seed
    return payload, rows, 0 if report.ok else 1


def _analyze_identity_sweep(args, cfg: RunConfig) -> tuple[dict, list, int]:
    import numpy as np

    seed = stream_seed(cfg.seed, "cone.algebra_identities")
    rng = np.random.default_rng(seed)
    bad = 0
    above = 0
    for _ in range(args.samples):
        den = int(rng.integers(2, 10**6))
        num = int(rng.integers(1, den))
        report = cone_mod.algebra_identities(Fraction(num, den))
        if not report.identity_holds or report.signs_ok is False:
            bad += 1
        if report.above_threshold:
            above += 1
    rows = [("samples", args.samples), ("violations", bad),
            ("above_threshold", above)]
    return {"op": "identity-sweep", "inputs": {"samples": args.samples},
            "worst_margin": None, "violations": bad, "seed": cfg.seed,
            "grid_resolution": None}, rows, 0 if bad == 0 else 1


def _analyze_inequality_sweep(args, cfg: RunConfig) -> tuple[dict, list, int]:
    report = cone_mod.inequality_sweep(args.max_n, args.samples)
    rows = [("max_n", report.max_n), ("s_samples", report.s_samples),
            ("violations", report.violations),
            ("worst_margin", f"{report.worst_margin:.3e}")]
    payload = report.to_json()
    payload["seed"] = cfg.seed
    return payload, rows, 0 if report.violations == 0 else 1


def _analyze_one27(args, cfg: RunConfig) -> tuple[dict, list, int]:
    graph, _ = load_3g(args.input)
    seed = stream_seed(cfg.seed, "cone.check_one_over_27")
    restarts = _resolve(args, "restarts", cfg.restarts)
    report = cone_mod.check_one_over_27(graph, restarts=restarts, seed=seed)
    rows = [("graph", args.input), ("max_q", report.max_q),
            ("exact", report.exact_value),
            ("within 1/27", report.within_bound)]
    return {"op": "one27", "inputs": {"in": args.input},
            "worst_margin": 1.0 / 27.0 + cfg.numeric_tol - report.max_q,
            "violations": [] if report.within_bound else [report.max_q],
            "seed": cfg.seed, "grid_resolution": None}, rows, 0


def _analyze_qof(args, cfg: RunConfig) -> tuple[dict, list, int]:
    graph, _ = load_3g(args.input)
    weights = (_weights_arg(args.weights) if args.weights
               else WeightVector.uniform(graph.vertex_count))
    q, rho = cone_mod.q_of(graph, weights)
    rows = [("graph", args.input), ("q", q), ("rho", rho),
            ("tau(rho)", cone_mod.tau(rho))]
    return {"op": "qof", "inputs": {"in": args.input},
            "q": str(q), "rho": str(rho), "seed": cfg.seed}, rows, 0


def _analyze_qtau(args, cfg: RunConfig) -> tuple[dict, list, int]:
    graph, _ = load_3g(args.input)
    seed = stream_seed(cfg.seed, "cone.falsify_q_tau")
    restarts = _resolve(args, "restarts", cfg.restarts)
    report = cone_mod.falsify_q_tau(graph, restarts=restarts, seed=seed)
    rows = [("graph", args.input), ("found", report.found),
            ("hypotheses_violated", report.hypotheses_violated),
            ("best q - tau", f"{report.best_value:.6e}")]
    payload = report.to_json()
    payload["seed"] = cfg.seed
    refuted = report.found and not report.hypotheses_violated
    return payload, rows, 1 if refuted else 0


def _analyze_stationarity(args, cfg: RunConfig) -> tuple[dict, list, int]:
    graph, _ = load_3g(args.input)
    weights = (_weights_arg(args.weights) if args.weights
               else WeightVector.uniform(graph.vertex_count))
    report = cone_mod.stationarity_report(graph, weights, tol=cfg.gradient_tol)
    rows = [("graph", args.input), ("mu", report.mu),
            ("A", report.A), ("B", report.B),
            ("max residual", max(report.residuals)), ("holds", report.holds)]
    return {"op": "stationarity", "inputs": {"in": args.input},
            "mu": report.mu, "residuals": list(report.residuals),
            "holds": report.holds, "seed": cfg.seed}, rows, 0


def _analyze_cone_cert(args, cfg: RunConfig) -> tuple[dict, list, int]:
    graph, _ = load_3g(args.input)
    seed = stream_seed(cfg.seed, "cone.certify_cone_bound")
    restarts = _resolve(args, "restarts", cfg.restarts)
    cert = cone_mod.certify_cone_bound(graph, restarts=restarts, seed=seed)
    rows = [("graph", args.input), ("status", cert.status),
            ("sparse", cert.is_sparse), ("max_codegree", cert.max_codegree)]
    if cert.estimate is not None:
        rows.append(("numeric_max", cert.estimate.numeric_max))
    payload = cert.to_json()
    payload["seed"] = cfg.seed
    return payload, rows, 0 if cert.certified else 1


def _analyze_lagrangian(args, cfg: RunConfig) -> tuple[dict, list, int]:
    graph, _ = load_3g(args.input)
    seed = stream_seed(cfg.seed, "lagrangian.maximize")
    restarts = _resolve(args, "restarts", cfg.restarts)
    estimate = maximize_lagrangian(graph, restarts=restarts, seed=seed)
    rows = [("graph", args.input),
            ("lower_bound", estimate.lower_bound),
            ("numeric_max", estimate.numeric_max),
            ("converged", estimate.converged)]
    payload = {"op": "lagrangian", "inputs": {"in": args.input},
               "lower_bound": str(estimate.lower_bound),
               "numeric_max": estimate.numeric_max,
               "converged": estimate.converged, "seed": cfg.seed,
               "grid_resolution": None}
    steps = _resolve(args, "grid_steps", cfg.grid_steps)
    if graph.vertex_count <= GRID_VERTEX_CAP and steps > 0:
        grid_value = grid_oracle(graph, steps)
        rows.append(("grid_oracle", grid_value))
        payload["grid_oracle"] = grid_value
        payload["grid_resolution"] = steps
    return payload, rows, 0


_ANALYZE_OPS = {
    "tau": _analyze_tau,
    "phi": _analyze_phi,
    "apex-opt": _analyze_apex_opt,
    "tau-sweep": _analyze_tau_sweep,
    "identity-sweep": _analyze_identity_sweep,
    "inequality-sweep": _analyze_inequality_sweep,
    "one27": _analyze_one27,
    "qof": _analyze_qof,
    "qtau": _analyze_qtau,
    "stationarity": _analyze_stationarity,
    "cone-cert": _analyze_cone_cert,
    "lagrangian": _analyze_lagrangian,
}


def cmd_analyze(args, cfg: RunConfig) -> int:
    payload, rows, code = _ANALYZE_OPS[args.analyze_op](args, cfg)
    _print_table(rows)
    _emit(payload, args.out)
    return code


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    # --seed / --config ride on every leaf parser so they can follow the
    # subcommand, the way runs are naturally typed
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value config file")
    common.add_argument("--seed", type=int, help="root seed (default 0)")
    common.add_argument("--tol", type=float,
                        help="override both numeric and gradient tolerances")

    parser = argparse.ArgumentParser(
        prog="hyperjump",
        description="Certify the 4/9 witness family and its supporting bounds.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sts = sub.add_parser("sts", parents=[common],
                           help="build a Steiner triple system")
    p_sts.add_argument("--t", type=int, required=True)
    p_sts.add_argument("--method", choices=("bose", "skolem", "cyclic"))
    p_sts.add_argument("--out")
    p_sts.set_defaults(func=cmd_sts)

    p_ver = sub.add_parser("verify", parents=[common],
                           help="run the witness pipeline or re-check a certificate")
    p_ver.add_argument("--t", type=int)
    p_ver.add_argument("--m", type=int, default=4)
    p_ver.add_argument("--policy", choices=("auto", "exhaustive", "sampled"),
                       default="auto")
    p_ver.add_argument("--restarts", type=int)
    p_ver.add_argument("--spot-checks", type=int, default=2)
    p_ver.add_argument("--out")
    p_ver.add_argument("--in", dest="input", help="existing certificate to re-verify")
    p_ver.add_argument("--deep", action="store_true")
    p_ver.set_defaults(func=cmd_verify)

    p_ana = sub.add_parser("analyze", help="run one analysis op")
    ana_sub = p_ana.add_subparsers(dest="analyze_op", required=True)

    def op(name, **flags):
        sp = ana_sub.add_parser(name, parents=[common])
        for flag, kwargs in flags.items():
            sp.add_argument(f"--{flag.replace('_', '-')}", **kwargs)
        sp.add_argument("--out")
        sp.set_defaults(func=cmd_analyze)
        return sp

    op("tau", rho={"required": True})
    op("phi", b={"required": True}, q={"required": True}, rho={"required": True})
    op("apex-opt", q={"required": True}, rho={"required": True})
    op("tau-sweep", samples={"type": int, "default": 10_000},
       grid_steps={"type": int})
    op("identity-sweep", samples={"type": int, "default": 100})
    op("inequality-sweep", max_n={"type": int, "default": 10_000},
       samples={"type": int, "default": 1_000})
    op("one27", **{"in": {"dest": "input", "required": True}},
       restarts={"type": int})
    op("qof", **{"in": {"dest": "input", "required": True}}, weights={})
    op("qtau", **{"in": {"dest": "input", "required": True}},
       restarts={"type": int})
    op("stationarity", **{"in": {"dest": "input", "required": True}}, weights={})
    op("cone-cert", **{"in": {"dest": "input", "required": True}},
       restarts={"type": int})
    op("lagrangian", **{"in": {"dest": "input", "required": True}},
       restarts={"type": int}, grid_steps={"type": int})

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _apply_thread_cap()
    try:
        cfg = load_config(args.config) if args.config else RunConfig()
        if args.seed is not None:
            cfg.seed = args.seed
        if getattr(args, "tol", None) is not None:
            if args.tol <= 0:
                raise DomainError(f"--tol must be positive, got {args.tol}")
            cfg.numeric_tol = args.tol
            cfg.gradient_tol = args.tol
        return args.func(args, cfg)
    except HyperjumpError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
