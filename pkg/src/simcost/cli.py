"""Batch driver: scheme sweeps, bound reports, log-log fits, model verification.

Exit codes: 0 success, 1 usage or parse error, 2 assumption failure,
3 solver non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import config as cfgmod
from . import complexity as cx
from . import lindblad, models, norms, qmat, schemes
from .sdp import SdpNonConvergence

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_ASSUMPTION = 2
EXIT_SOLVER = 3

SCHEMES = ("symmetric", "poisson", "dilated", "exact-ad", "exact-pauli")
KINDS = ("uniform", "fixed-time", "fixed-precision")


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


def _worker_count(args) -> int:
    if args.workers is not None:
        return max(1, args.workers)
    env = os.environ.get("SIMCOST_WORKERS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def _simulate_symmetric(model, t: float):
    prod, acct = schemes.symmetric_scheme(model.generator, t, model.gates)
    err = norms.diamond_distance(model.evolve(t), prod.superop)
    bound = schemes.symmetric_scheme_error_bound(model.generator, t)
    return err, bound, acct.total


def _simulate_poisson(model, t: float, n_trunc: int):
    if hasattr(model, "poisson_phi"):
        phi = model.poisson_phi()
        rate = model.poisson_rate()
    else:
        phi, rate = model.poisson_decomposition()
    param = rate * t
    sup, acct = schemes.poisson_truncated(phi, param, n_trunc)
    err = norms.diamond_distance(model.evolve(t), sup)
    bound = schemes.poisson_tail_bound(param, n_trunc)
    return err, bound, acct.total


def _simulate_dilated(model, t: float):
    dims_ae = model.dims + (2,)
    blocks = []
    for v in model.jumps:
        h = schemes.dilation_hamiltonian(v)
        blk = schemes.symmetric_local_channel(h, t / 2.0, model.gates)
        blocks.append(
            schemes.MixedUnitaryChannel(dims=dims_ae, atoms=blk.atoms, gates=model.gates)
        )
    sch = schemes.DilatedScheme(
        sys_dims=model.dims, anc_dim=2, blocks=tuple(blocks), gates=model.gates
    )
    err = norms.diamond_distance(model.evolve(t), sch.system_superop)
    bound = schemes.dilated_first_order_error_bound([qmat.op_norm(v) for v in model.jumps], t)
    return err, bound, schemes.depth(sch).total


def _simulate_exact_ad(model, t: float):
    if not isinstance(model, models.AmplitudeDampingModel):
        raise cfgmod.ConfigError("scheme exact-ad requires model = \"amplitude-damping\"")
    sch = model.exact_scheme(t)
    err = norms.diamond_distance(model.evolve(t), sch.system_superop)
    return err, 0.0, schemes.depth(sch).total


def _simulate_exact_pauli(model, t: float):
    if not isinstance(model, models.PauliNoiseModel) or model.n != 1:
        raise cfgmod.ConfigError("scheme exact-pauli requires model = \"pauli\" on one qubit")
    gates = schemes.GateSet(
        "pauli-dilated", tau=model.tau,
        generators=(np.kron(qmat.Y, qmat.X), np.kron(qmat.X, qmat.Y)),
    )
    sch = schemes.pauli_noise_exact(t, gates=gates)
    err = norms.diamond_distance(model.evolve(t), sch.system_superop)
    return err, 0.0, schemes.depth(sch).total


def _ratio(err: float, bound) -> float:
    if bound is None:
        return float("nan")
    if bound == 0.0:
        return 0.0 if err <= 1e-12 else float("inf")
    return err / bound


def _simulate_rows(cfg, model, scheme: str, workers: int):
    ts = cfg.sweep.t_values
    if scheme == "poisson":
        orders = cfg.sweep.n_values or (1, 2, 3, 4)
        points = [(t, n) for t in ts for n in orders]

        def job(point):
            t, n = point
            err, bound, depth = _simulate_poisson(model, t, n)
            return {"t": t, "n_trunc": n, "diamond_error": err,
                    "analytic_bound": bound, "depth": depth,
                    "error_over_bound": _ratio(err, bound)}

        header = ["t", "n_trunc", "diamond_error", "analytic_bound", "depth", "error_over_bound"]
    else:
        sim = {
            "symmetric": _simulate_symmetric,
            "dilated": _simulate_dilated,
            "exact-ad": _simulate_exact_ad,
            "exact-pauli": _simulate_exact_pauli,
        }[scheme]
        points = list(ts)

        def job(t):
            err, bound, depth = sim(model, t)
            row = {"t": t, "diamond_error": err,
                   "analytic_bound": bound if bound is not None else float("nan"),
                   "depth": depth,
                   "error_over_bound": _ratio(err, bound)}
            return row

        header = ["t", "diamond_error", "analytic_bound", "depth", "error_over_bound"]

    if not points:
        return header, []
    if workers > 1 and len(points) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(job, points))
    else:
        rows = [job(p) for p in points]
    return header, rows


def cmd_simulate(args) -> int:
    cfg = cfgmod.load_config(args.config)
    if args.seed is not None:
        cfg.seed = args.seed
    model = cfgmod.build_model(cfg)
    scheme = args.scheme
    if scheme not in SCHEMES:
        print(f"unknown scheme {scheme!r}; choose from {SCHEMES}", file=sys.stderr)
        return EXIT_USAGE
    if scheme == "symmetric":
        bad = [i for i, v in enumerate(model.jumps) if not qmat.is_hermitian(v)]
        if bad:
            print(
                f"scheme 'symmetric' needs Hermitian jump operators; jump(s) {bad} are not. "
                "Use 'dilated' (one ancilla qubit) for non-symmetric jumps.",
                file=sys.stderr,
            )
            return EXIT_USAGE
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    header, rows = _simulate_rows(cfg, model, scheme, _worker_count(args))
    out_path = out_dir / f"{cfg.name}-{scheme}.csv"
    with open(out_path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(row[h]) for h in header])
    print(f"wrote {out_path} ({len(rows)} rows)")
    return EXIT_OK


def _render_report(report: cx.BoundReport) -> str:
    lines = [
        f"model:      {report.model}",
        f"kind:       {report.kind}" + ("  (environment-assisted)" if report.env_assisted else ""),
        f"parameters: alpha={report.alpha:g} beta={report.beta:g} eps={report.epsilon:g} tau={report.tau:g}",
        f"kappa:      [{report.kappa_lower:.12g}, {report.kappa_upper:.12g}]",
        f"D:          {report.d_compat:.12g}" + ("" if report.d_certified else "  (search estimate, uncertified)"),
        f"t_mix:      {report.t_mix:.12g}  via {report.t_mix_route} (threshold {report.t_mix_threshold:.6g})",
        f"C_ab:       {report.c_const:.12g}",
        f"lower bound on simulation cost: {report.bound:.12g}",
    ]
    if report.upper_bound is not None:
        lines.append(f"upper bound: {report.upper_bound:.12g}  [{report.upper_bound_label}]")
        lines.append(f"sandwich:    {report.bound:.6g} <= cost <= {report.upper_bound:.6g}")
    if report.fixed_time is not None:
        ft = report.fixed_time
        if ft.applicable:
            lines.append(f"fixed-time bound at tau={report.fixed_time_tau:g}: {ft.value:.12g}")
        else:
            lines.append(f"fixed-time bound inapplicable: {ft.condition}")
    if report.fixed_precision is not None:
        fp = report.fixed_precision
        if fp.applicable:
            lines.append(
                f"fixed-precision bound at t={report.fixed_precision_t:g}, "
                f"delta={report.fixed_precision_delta:g}: {fp.value:.12g}"
            )
        else:
            lines.append(f"fixed-precision bound inapplicable: {fp.condition}")
    lines.append(f"certificates: {', '.join(report.certificates)}")
    if report.assumptions is not None:
        lines.append("assumption checks:")
        lines.append(str(report.assumptions))
    return "\n".join(lines) + "\n"


def cmd_bound(args) -> int:
    cfg = cfgmod.load_config(args.config)
    if args.seed is not None:
        cfg.seed = args.seed
    model = cfgmod.build_model(cfg)
    kind = args.kind
    if kind not in KINDS:
        print(f"unknown kind {kind!r}; choose from {KINDS}", file=sys.stderr)
        return EXIT_USAGE
    rng = np.random.default_rng(cfg.seed)
    fixed_time_tau = cfg.bounds.fixed_time_tau if kind == "fixed-time" else None
    fixed_precision = None
    if kind == "fixed-time" and fixed_time_tau is None:
        print("kind fixed-time needs bounds.fixed_time_tau in the config", file=sys.stderr)
        return EXIT_USAGE
    if kind == "fixed-precision":
        if cfg.bounds.target_time is None or cfg.bounds.delta is None:
            print("kind fixed-precision needs bounds.target_time and bounds.delta", file=sys.stderr)
            return EXIT_USAGE
        fixed_precision = (cfg.bounds.target_time, cfg.bounds.delta)

    report = model.uniform_report(
        cfg.bounds.alpha,
        cfg.bounds.beta,
        epsilon=cfg.bounds.epsilon,
        rng=rng,
        fixed_time_tau=fixed_time_tau,
        fixed_precision=fixed_precision,
        kind=kind,
    )
    if report.assumptions is not None and not report.assumptions.all_passed:
        print("assumption checks FAILED:", file=sys.stderr)
        print(str(report.assumptions), file=sys.stderr)
        if not args.force:
            return EXIT_ASSUMPTION
        print("continuing under --force", file=sys.stderr)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    txt_path = out_dir / f"{cfg.name}-bound.txt"
    json_path = out_dir / f"{cfg.name}-bound.json"
    text = _render_report(report)
    txt_path.write_text(text)
    json_path.write_text(json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n")
    print(text, end="")
    print(f"wrote {txt_path} and {json_path}")
    return EXIT_OK


def fit_loglog(xs, ys) -> tuple[float, float, float]:
    """Least squares on log-log; returns slope, intercept, R^2."""
    if len(xs) < 4:
        raise ValueError("need at least 4 rows for a fit")
    if any(x <= 0 for x in xs) or any(y <= 0 for y in ys):
        raise ValueError("log-log fit needs strictly positive values")
    lx = np.log(np.asarray(xs))
    ly = np.log(np.asarray(ys))
    slope, intercept = np.polyfit(lx, ly, 1)
    pred = slope * lx + intercept
    ss_res = float(np.sum((ly - pred) ** 2))
    ss_tot = float(np.sum((ly - np.mean(ly)) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(intercept), r2


def cmd_fit(args) -> int:
    path = Path(args.csv)
    if not path.exists():
        print(f"no such file: {path}", file=sys.stderr)
        return EXIT_USAGE
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        rows = list(reader)
    if args.x not in (reader.fieldnames or []) or args.y not in (reader.fieldnames or []):
        print(f"columns {args.x!r}/{args.y!r} not in {reader.fieldnames}", file=sys.stderr)
        return EXIT_USAGE
    try:
        xs = [float(r[args.x]) for r in rows]
        ys = [float(r[args.y]) for r in rows]
        slope, intercept, r2 = fit_loglog(xs, ys)
    except ValueError as exc:
        print(f"fit error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(f"slope {slope:.6f}  intercept {intercept:.6f}  R2 {r2:.8f}")
    return EXIT_OK


def cmd_verify(args) -> int:
    cfg = cfgmod.load_config(args.config)
    model = cfgmod.build_model(cfg)
    rng = np.random.default_rng(cfg.seed)
    failures = []

    # Channel structure of the exact semigroup at a few times.
    for t in (0.1, 0.7):
        sup = model.evolve(t)
        if not qmat.is_cptp(sup):
            failures.append(f"T_{t} is not CPTP within tolerance")
    s, t = 0.3, 0.5
    res = np.linalg.norm(model.evolve(s) @ model.evolve(t) - model.evolve(s + t))
    if res > 1e-9:
        failures.append(f"semigroup law violated (residual {res:.2e})")

    if getattr(model, "resource", None) is not None:
        try:
            d_val = None
            if isinstance(model, models.AmplitudeDampingModel):
                compat = model.compatibility()
                d_val = compat.value
                report = model.assumption_report(d_compat=d_val, rng=rng)
            else:
                compat = cx.compatibility_D(model.gates, model.resource)
                d_val = compat.value
                report = model.assumption_report(d_compat=d_val, rng=rng)
            print(report)
            if not report.all_passed:
                failures.append("assumption checks failed")
        except (ValueError, RuntimeError) as exc:
            failures.append(f"assumption machinery: {exc}")

    certs = getattr(model, "certificates", None)
    if certs is None and hasattr(model, "certificate"):
        certs = (model.certificate,)
    if certs and getattr(model, "resource", None) is not None:
        for i, c in enumerate(certs):
            if cx.lipschitz_seminorm(c, model.resource) <= cx.SEMINORM_FLOOR:
                failures.append(f"certificate #{i + 1} has vanishing seminorm")

    if failures:
        for f in failures:
            print(f"FAIL: {f}", file=sys.stderr)
        return EXIT_ASSUMPTION
    print("all checks passed")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="simcost",
        description="Lindblad simulation schemes, diamond-norm errors, and "
        "Lipschitz-complexity lower bounds",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="TOML model configuration")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--seed", type=int, default=None, help="override config seed")
        p.add_argument("--workers", type=int, default=None,
                       help="worker threads (default: processors, or SIMCOST_WORKERS)")
        p.add_argument("--force", action="store_true", help="continue past failed assumptions")

    p_sim = sub.add_parser("simulate", help="sweep a scheme over the t grid, emit CSV")
    common(p_sim)
    p_sim.add_argument("--scheme", required=True, choices=SCHEMES)

    p_bound = sub.add_parser("bound", help="assemble a lower-bound report")
    common(p_bound)
    p_bound.add_argument("--kind", default="uniform", choices=KINDS)

    p_fit = sub.add_parser("fit", help="log-log least squares on CSV columns")
    p_fit.add_argument("--csv", required=True)
    p_fit.add_argument("--x", default="t")
    p_fit.add_argument("--y", default="diamond_error")

    p_verify = sub.add_parser("verify", help="assumption and invariant suite")
    common(p_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        if args.command == "simulate":
            return cmd_simulate(args)
        if args.command == "bound":
            return cmd_bound(args)
        if args.command == "fit":
            return cmd_fit(args)
        if args.command == "verify":
            return cmd_verify(args)
    except cfgmod.ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SdpNonConvergence as exc:
        print(f"solver non-convergence: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
