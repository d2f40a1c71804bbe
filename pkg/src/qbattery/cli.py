"""Command-line sweeps writing CSV tables.

Exit codes: 0 success, 1 usage or configuration error, 2 verification failure.
"""

from __future__ import annotations

import argparse
import contextlib
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from functools import partial

import numpy as np

from . import cycle, ergo, measopt, qla
from .config import ConfigError, ScenarioConfig, coerce, load_config
from .model import charger_init

log = logging.getLogger("qbattery")

HEADERS = {
    "time-sweep": ["t", "ergotropy", "daemonic_min", "daemonic_max", "gap", "band"],
    "beta-sweep": ["beta", "tau", "e_max", "daemonic_min", "gap", "gapless"],
    "double-mode": ["m", "tau_m", "e_b", "e_b1", "e_b2", "simultaneous"],
    "landscape": ["r0", "alpha", "advantage"],
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def _qubit_charger():
    return charger_init("excited_level", 2).rho


# Row builders are module-level so a process pool can pickle them.

def time_row(cfg: ScenarioConfig, t: float) -> list:
    model = cfg.single_mode()
    rho_b = cfg.battery_state(model.battery_dim)
    rho_ab = cycle.joint_state(model, rho_b, _qubit_charger(), t)
    rep = measopt.daemonic_report(rho_ab, model, t, gapless_threshold=cfg.gapless_threshold, **cfg.opt_kwargs())
    return [t, rep.ergotropy, rep.daemonic_min, rep.daemonic_max, rep.gap, rep.band]


def beta_row(cfg: ScenarioConfig, beta: float) -> list:
    from .model import battery_init

    model = cfg.single_mode()
    rho_b = battery_init("thermal", model.battery_dim, beta=beta, omega=cfg.omega).rho
    rho_a = _qubit_charger()
    tau, e_max = cycle.find_tau(model, rho_b, rho_a)
    if tau is None:
        return [beta, float("nan"), 0.0, float("nan"), float("nan"), False]
    rho_ab = cycle.joint_state(model, rho_b, rho_a, tau)
    rep = measopt.daemonic_report(rho_ab, model, tau, gapless_threshold=cfg.gapless_threshold, **cfg.opt_kwargs())
    return [beta, tau, rep.ergotropy, rep.daemonic_min, rep.gap, rep.gapless]


def landscape_rows(cfg: ScenarioConfig, r0: float) -> list[list]:
    model = cfg.single_mode()
    rho_b = ScenarioConfig(**{**cfg.__dict__, "init": f"trunc2:{r0!r}"}).battery_state(model.battery_dim)
    rho_a = _qubit_charger()
    tau, _ = cycle.find_tau(model, rho_b, rho_a)
    if tau is None:
        return [[r0, a, 0.0] for a in cfg.alpha_grid]
    ev = ergo.DaemonicEvaluator(cycle.joint_state(model, rho_b, rho_a, tau), model)
    alphas = np.asarray(cfg.alpha_grid)
    vals = ev(measopt.qubit_vectors(alphas, cfg.gamma)) - ev.ergotropy
    return [[r0, a, v] for a, v in zip(alphas, vals)]


def _ordered_map(fn, items, workers: int):
    """Results in input order whatever the completion order."""
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def run_time_sweep(cfg: ScenarioConfig):
    yield HEADERS["time-sweep"]
    yield from _ordered_map(partial(time_row, cfg), list(cfg.tgrid), cfg.workers)


def run_beta_sweep(cfg: ScenarioConfig):
    yield HEADERS["beta-sweep"]
    yield from _ordered_map(partial(beta_row, cfg), list(cfg.beta_grid), cfg.workers)


def run_landscape(cfg: ScenarioConfig):
    yield HEADERS["landscape"]
    for rows in _ordered_map(partial(landscape_rows, cfg), list(cfg.r0_grid), cfg.workers):
        yield from rows


def run_repeat_charge(cfg: ScenarioConfig):
    model = cfg.single_mode()
    d_b = model.battery_dim
    yield ["m", "tau_m", "e_max_m"] + [f"pop_{i}" for i in range(d_b)]
    traj = cycle.repeat_cycles(model, cfg.battery_state(d_b), _qubit_charger(), cfg.cycles)
    log.info("repeat-charge stopped after %d cycles: %s", len(traj.records), traj.terminated)
    for r in traj.records:
        yield [r.m, r.tau, r.e_max, *r.populations]


def run_double_mode(cfg: ScenarioConfig):
    model = cfg.double_mode()
    d = model.mode_dims[0]
    rho_b = qla.kron(*(cfg.battery_state(d, w) for w in model.mode_freqs))
    rho_a = charger_init("superposition", model.charger_dim, theta=cfg.theta, phi=cfg.phi).rho
    traj = cycle.repeat_cycles(model, rho_b, rho_a, cfg.cycles)
    log.info("double-mode stopped after %d cycles: %s", len(traj.records), traj.terminated)
    flags = cycle.simultaneous_charging_check(traj, model)
    yield HEADERS["double-mode"]
    for r, s in zip(traj.records, flags):
        yield [r.m, r.tau, r.e_max, *r.per_mode_ergotropy, s]


RUNNERS = {
    "time-sweep": run_time_sweep,
    "beta-sweep": run_beta_sweep,
    "repeat-charge": run_repeat_charge,
    "double-mode": run_double_mode,
    "landscape": run_landscape,
}


@contextlib.contextmanager
def _open_out(path: str):
    if path in ("-", ""):
        yield sys.stdout
        return
    try:
        fh = open(path, "w", encoding="utf-8", newline="")
    except OSError as exc:
        raise ConfigError(f"cannot write output {path}: {exc.strerror}") from None
    with fh:
        yield fh


def write_csv(rows, path: str) -> int:
    # open first so an unwritable path fails before any computation
    with _open_out(path) as fh:
        n = -1
        for row in rows:
            fh.write(",".join(r if isinstance(r, str) else fmt(r) for r in row) + "\n")
            n += 1
    return n


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qbattery", description="Quantum battery charging sweeps (CSV output).")
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    common = _Parser(add_help=False)
    for flag in ("--dim", "--omega", "--omega2", "--g", "--delta", "--init", "--theta", "--phi", "--cycles",
                 "--tgrid", "--seed", "--out", "--gapless-threshold", "--beta-grid", "--r0-grid",
                 "--alpha-grid", "--gamma", "--alpha-points", "--gamma-points", "--starts", "--workers"):
        common.add_argument(flag, default=None, metavar=flag.lstrip("-").replace("-", "_").upper())
    common.add_argument("--config", default=None, metavar="PATH", help="flat key = value file")
    for name in RUNNERS:
        sub.add_parser(name, parents=[common], help=f"write the {name} table")
    sub.add_parser("verify", parents=[common], help="run the regression checks, exit 2 on failure")
    return p


def config_from_args(args) -> ScenarioConfig:
    overrides = {}
    for key, value in vars(args).items():
        if key in ("command", "config", "verbose") or value is None:
            continue
        overrides[key] = coerce(key, value)
    return load_config(args.config, overrides)


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(message)s")
        cfg = config_from_args(args)
        if args.command == "verify":
            from .verify import run_all

            checks = run_all()
            return 0 if all(c.passed for c in checks) else 2
        write_csv(RUNNERS[args.command](cfg), cfg.out)
        return 0
    except (UsageError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
