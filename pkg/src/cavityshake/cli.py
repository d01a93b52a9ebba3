"""Command-line front end: plot data, sweeps, oracle reports and the acceptance run.

Exit codes: 0 success, 1 invalid input, 2 numerical failure, 3 acceptance failure.
"""
from __future__ import annotations

import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace

import click
import numpy as np

from .errors import InputError, NumericalError
from .io import ScenarioConfig, SweepSpec, load_config, metadata, write_csv
from .model import ModelParams, NumericsConfig

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC, EXIT_ACCEPT = 0, 1, 2, 3

log = logging.getLogger("cavityshake")

# quantities a generic sweep can report, each computed from one ModelParams point
SWEEP_QUANTITIES = ("n_dce", "F", "w_up", "eta", "w_sudden", "w_shake", "P_oracle")


# ---- per-point workers (module level so process pools can pickle them) ----

def _point_transient(args):
    from .bogoliubov import integrate_bogoliubov
    from .errors import BaselineUndefinedError
    from .transient import excitation_probability_transient
    params, cfg = args
    traj = integrate_bogoliubov(params.profile(), cfg)
    try:
        r = excitation_probability_transient(traj, params)
        return (params.tau, r.F, r.w_up)
    except BaselineUndefinedError:
        return (params.tau, float("nan"), float("nan"))


def _point_eta(args):
    from .backreaction import eta
    from .errors import BaselineUndefinedError
    params, cfg = args
    try:
        r = eta(params, cfg, sensitivity=False)
        wa = r.eta_with_absorption if r.eta_with_absorption is not None else float("nan")
        return (params.tau, r.eta, r.delta_N_inf, r.N_dce, wa)
    except BaselineUndefinedError:
        return (params.tau, float("nan"), float("nan"), float("nan"), float("nan"))


def _point_generic(args):
    params, cfg, quantity = args
    from .errors import BaselineUndefinedError
    try:
        if quantity == "n_dce":
            from .bogoliubov import integrate_bogoliubov
            return integrate_bogoliubov(params.profile(), cfg).n_dce
        if quantity in ("F", "w_up"):
            from .bogoliubov import integrate_bogoliubov
            from .transient import excitation_probability_transient
            r = excitation_probability_transient(integrate_bogoliubov(params.profile(), cfg), params)
            return r.F if quantity == "F" else r.w_up
        if quantity == "eta":
            from .backreaction import eta
            return eta(params, cfg, sensitivity=False).eta
        if quantity == "w_sudden":
            from .sudden import excitation_probability_sudden
            return excitation_probability_sudden(params.rho, params.xi, cfg.series_tol)
        if quantity == "w_shake":
            from .lamb import shaking_probability
            return shaking_probability(params).w_shake
        if quantity == "P_oracle":
            from .oracle import evolve
            return evolve(params, cfg=cfg).P_excited_dressed
    except BaselineUndefinedError:
        return float("nan")
    raise InputError(f"unknown sweep quantity {quantity!r}")


def parallel_map(fn, items, workers: int):
    """Ordered map; with one worker everything runs in-process."""
    items = list(items)
    if workers <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))


# ---- shared options ----

def _common(f):
    opts = [
        click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None,
                     help="YAML or JSON scenario file; flags override its values."),
        click.option("--E0", "E0", type=float, default=None, help="Atomic transition frequency."),
        click.option("--omega1", type=float, default=None, help="Initial mode frequency."),
        click.option("--omega2", type=float, default=None, help="Final mode frequency."),
        click.option("--lam", type=float, default=None, help="Atom-mode coupling."),
        click.option("--tau", type=float, default=None, help="Switching time (0 = sudden)."),
        click.option("--rtol", type=float, default=None, help="ODE relative tolerance."),
        click.option("--atol", type=float, default=None, help="ODE absolute tolerance."),
        click.option("--fock-max", type=int, default=None, help="Fock cutoff for the oracle."),
        click.option("--samples", type=int, default=None, help="Number of output time samples."),
        click.option("--window", type=(float, float), default=None, help="Integration window t_min t_max."),
        click.option("--workers", type=int, default=None, help="Worker processes for sweeps."),
        click.option("-o", "--output", default=None, help="Output CSV path ('-' for stdout)."),
        click.option("--no-timestamp", is_flag=True, help="Omit the generation time from the header."),
    ]
    for o in reversed(opts):
        f = o(f)
    return f


def _resolve(scenario, kw) -> ScenarioConfig:
    cfg = load_config(kw["config_path"]) if kw.get("config_path") else ScenarioConfig()
    p = {k: kw[k] for k in ("E0", "omega1", "omega2", "lam", "tau") if kw.get(k) is not None}
    n = {}
    for flag, name in (("rtol", "ode_rel_tol"), ("atol", "ode_abs_tol"), ("fock_max", "fock_max"),
                       ("samples", "sample_count"), ("window", "window")):
        if kw.get(flag) is not None:
            n[name] = tuple(kw[flag]) if flag == "window" else kw[flag]
    out = {}
    if kw.get("output") is not None:
        out["output"] = kw["output"]
    if kw.get("workers") is not None:
        out["workers"] = kw["workers"]
    params = replace(cfg.params, **p) if p else cfg.params
    numerics = replace(cfg.numerics, **n) if n else cfg.numerics
    if cfg.scenario != "custom" and cfg.scenario != scenario:
        log.info("config scenario %s overridden by subcommand (%s)", cfg.scenario, scenario)
    return replace(cfg, scenario=scenario, params=params, numerics=numerics, **out)


def _sweep_or(cfg: ScenarioConfig, default: SweepSpec) -> np.ndarray:
    return (cfg.sweep or default).values()


def _emit(cfg: ScenarioConfig, header, rows, kw, **extra):
    meta = metadata(cfg.params, cfg.numerics, cfg.numerics.window_for(cfg.params.profile())
                    if cfg.params.tau >= 0 else None, scenario=cfg.scenario, **extra)
    write_csv(cfg.output, header, rows, meta, timestamp=not kw.get("no_timestamp"))


@click.group()
@click.option("-v", "--verbose", count=True, help="Increase log verbosity.")
def cli(verbose):
    """Atom in a cavity with a time-dependent mode frequency."""
    logging.basicConfig(level=logging.WARNING - 10 * min(verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")


@cli.command()
@_common
@click.option("--rho-range", type=(float, float, int), default=(0.01, 100.0, 41), show_default=True,
              help="Log grid of rho = omega2/omega1: min max count.")
@click.option("--xi-range", type=(float, float, int), default=(0.01, 100.0, 41), show_default=True,
              help="Log grid of xi = lam/detuning: min max count.")
def fig1(rho_range, xi_range, **kw):
    """Sudden-switch excitation probability on a (rho, xi) grid."""
    from .sudden import excitation_grid
    cfg = _resolve("fig1_sudden_grid", kw)
    rhos = SweepSpec("omega2", rho_range[0], rho_range[1], rho_range[2], "log").values()
    xis = SweepSpec("lam", xi_range[0], xi_range[1], xi_range[2], "log").values()
    rows = excitation_grid(rhos, xis, cfg.numerics.series_tol)
    _emit(cfg, ["rho", "xi", "w_up"], rows, kw)


@cli.command()
@_common
def fig2(**kw):
    """Excitation efficiency F and excitation probability versus switching time."""
    cfg = _resolve("fig2_transient_sweep", kw)
    taus = _sweep_or(cfg, SweepSpec("tau", 1e-3, 10.0, 41, "log"))
    rows = parallel_map(_point_transient, [(cfg.params.with_(tau=float(t)), cfg.numerics) for t in taus],
                        cfg.workers)
    _emit(cfg, ["tau", "F", "w_up"], rows, kw)


@cli.command()
@_common
@click.option("--full", is_flag=True, help="Also write Re/Im of alpha and beta.")
def fig3(full, **kw):
    """Time trace of |beta(t)|^2 for one switching time (default tau = 1)."""
    from .bogoliubov import integrate_bogoliubov
    cfg = _resolve("fig3_beta_trace", kw)
    traj = integrate_bogoliubov(cfg.params.profile(), cfg.numerics)
    header, cols = traj.csv_rows()
    if not full:
        header, cols = ["t", "abs_beta2"], cols[:, [0, 5]]
    _emit(cfg, header, cols, kw, n_dce=traj.n_dce, symplectic_defect=traj.symplectic_defect())


@cli.command()
@_common
def fig4(**kw):
    """Relative photon-number correction eta versus switching time."""
    cfg = _resolve("fig4_eta_sweep", kw)
    taus = _sweep_or(cfg, SweepSpec("tau", 0.01, 5.0, 31, "log"))
    rows = parallel_map(_point_eta, [(cfg.params.with_(tau=float(t)), cfg.numerics) for t in taus],
                        cfg.workers)
    _emit(cfg, ["tau", "eta", "delta_N_inf", "N_dce", "eta_with_absorption"], rows, kw)


@cli.command()
@_common
def shake(**kw):
    """Ground-state shift before and after the switch, and the resulting excitation."""
    from .lamb import shaking_probability
    cfg = _resolve("shaking_report", kw)
    rep = shaking_probability(cfg.params)
    _emit(cfg, ["quantity", "value"], rep.rows(), kw)


@cli.command()
@_common
@click.option("--trajectory", type=click.Path(dir_okay=False), default=None,
              help="Also evolve once and write the observable trace here.")
@click.option("--distribution", type=click.Path(dir_okay=False), default=None,
              help="Write the final photon distribution here (needs --trajectory).")
@click.option("--rwa", is_flag=True, help="Drop the counter-rotating coupling in the trace run.")
def oracle(trajectory, distribution, rwa, **kw):
    """Exact Fock-space evolution compared against the approximate results."""
    from .oracle import evolve, oracle_cross_checks
    cfg = _resolve("oracle_check", kw)
    checks = oracle_cross_checks(cfg.params, cfg.numerics)
    _emit(cfg, ["comparison", "value_a", "value_b", "abs_diff", "tolerance", "passed", "note"],
          [c.row() for c in checks], kw)
    if trajectory:
        r = evolve(cfg.params, cfg=cfg.numerics, rwa=rwa)
        extra = dict(rwa=rwa, n_max=r.n_max, norm_drift=r.norm_drift, top_population=r.top_population,
                     truncation_safe=r.truncation_safe, P_excited_late=r.P_excited_dressed)
        tcfg = replace(cfg, output=trajectory)
        _emit(tcfg, *r.csv_rows(), kw, **extra)
        if distribution:
            _emit(replace(cfg, output=distribution), *r.distribution_rows(), kw, **extra)
    if not all(c.passed for c in checks):
        sys.exit(EXIT_ACCEPT)


@cli.command()
@_common
@click.option("--param", type=click.Choice(["E0", "omega1", "omega2", "lam", "tau"]), default=None)
@click.option("--min", "vmin", type=float, default=None)
@click.option("--max", "vmax", type=float, default=None)
@click.option("--count", type=int, default=None)
@click.option("--spacing", type=click.Choice(["lin", "log"]), default=None)
@click.option("--quantity", type=click.Choice(SWEEP_QUANTITIES), default="n_dce", show_default=True)
def sweep(param, vmin, vmax, count, spacing, quantity, **kw):
    """Sweep one model parameter and report one quantity per point."""
    cfg = _resolve("custom", kw)
    base = cfg.sweep
    spec = dict(param=param, min=vmin, max=vmax, count=count, spacing=spacing)
    if base is not None:
        spec = {k: (v if v is not None else getattr(base, k)) for k, v in spec.items()}
    missing = [k for k, v in spec.items() if v is None and k != "spacing"]
    if missing:
        raise InputError(f"sweep: missing {missing} (give flags or a sweep section in the config)")
    spec["spacing"] = spec["spacing"] or "lin"
    sp = SweepSpec(**spec)
    values = sp.values()
    pts = [(cfg.params.with_(**{sp.param: float(v)}), cfg.numerics, quantity) for v in values]
    res = parallel_map(_point_generic, pts, cfg.workers)
    cfg = replace(cfg, sweep=sp)
    _emit(cfg, [sp.param, quantity], list(zip(values, res)), kw, sweep=f"{sp.param} {sp.spacing} "
          f"[{sp.min:g}, {sp.max:g}] x {sp.count}")


@cli.command()
@click.option("--only", type=str, default=None, help="Comma-separated criterion numbers.")
def check(only):
    """Run the acceptance criteria; exit 3 if any fails."""
    from .acceptance import run_all
    sel = None
    if only:
        try:
            sel = {int(x) for x in only.split(",")}
        except ValueError:
            raise InputError(f"--only: expected comma-separated integers, got {only!r}") from None
    results = run_all(sel)
    for r in results:
        click.echo(r.line())
    failed = [r.number for r in results if not r.passed]
    click.echo(f"{len(results) - len(failed)}/{len(results)} criteria passed"
               + (f"; failed: {failed}" if failed else ""))
    if failed:
        sys.exit(EXIT_ACCEPT)


def main(argv=None) -> int:
    try:
        cli.main(args=argv, prog_name="cavityshake", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.Abort:
        return EXIT_INPUT
    except click.ClickException as exc:
        exc.show()
        return EXIT_INPUT
    except InputError as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_INPUT
    except NumericalError as exc:
        click.echo(f"numerical failure: {exc}", err=True)
        return EXIT_NUMERIC
    except SystemExit as exc:
        return int(exc.code or 0)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
