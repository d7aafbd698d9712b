#!/usr/bin/env python3
"""
Command-line interface for incoherenton-lab
Built with Typer and Rich; every run writes its products and a manifest to --out
"""

import logging
from pathlib import Path
from typing import Annotated, Any, Callable, Optional

import typer
from pydantic import ValidationError
from rich.console import Console
from typer import Option

from . import __version__
from .checks import require_passed, run_checks
from .config import CONFIG_PATH, load_config, parse_assignment, resolve_run_config, save_config
from .constants import EXIT_CONFIG, EXIT_NUMERICAL, strings_schema
from .exceptions import CheckFailedError, IncoherentonError
from .lab import IncoherentonLab
from .models import InitialState, RunConfig
from .utils.display import print_checks_as_table, print_dict_as_table, print_model_as_table, print_rows_as_table
from .utils.logging import get_logger, setup_logging
from .utils.output import write_json, write_manifest, write_rows

app = typer.Typer(
  name="incoh",
  help="incoherenton-lab - Liouvillian spectra, dynamics and exact solutions of dephasing lattice bosons",
  add_completion=False,
)
console = Console()
logger = get_logger(__name__)

# Model options
model_option = Option(None, "--model", help="hardcore | bose-hubbard (canonical: hardcore-dephasing, bose-hubbard-dephasing)")
sites_option = Option(None, "--L", help="Number of sites on the ring")
particles_option = Option(None, "--N", help="Number of particles")
hopping_option = Option(None, "--J", help="Hopping amplitude")
gamma_option = Option(None, "--gamma", help="Dephasing rate")
interaction_option = Option(None, "--U", help="On-site interaction (Bose-Hubbard only)")
sweep_option = Option(None, "--sweep", help="Parameter sweep 'param:start:stop:step', e.g. J:0.20:0.30:0.01")
# Dynamics options
k_option = Option(None, "--k", help="Wave vector of the density modulation")
delta_n_option = Option(None, "--delta-n", help="Modulation amplitude, |delta_n| <= 1")
tmax_option = Option(None, "--tmax", help="Final time (default 40/gamma)")
dt_option = Option(None, "--dt", help="Maximum RK4 step (default a tenth of the stability limit)")
seed_option = Option(None, "--seed", help="Seed of the first random initial state")
ensemble_option = Option(None, "--ensemble", help="Number of random pure states to average")
# Output and run options
out_option = Option(None, "--out", help="Output directory (default incoh-out)")
format_option = Option(None, "--format", help="Row output format: csv | json")
jobs_option = Option(None, "--jobs", help="Worker threads for sweeps and ensembles")
config_option = Option(None, "--config", help="Run configuration file (flat key = value TOML)")
verbose_option = Option(False, "--verbose", "-v", help="Log progress at INFO level")
debug_option = Option(False, "--debug", help="Log at DEBUG level and show full tracebacks")

Runner = Callable[[RunConfig, IncoherentonLab, Path], list[Path]]


def handle_error(e: Exception, debug: bool = False) -> int:
  """
  Report an error and pick the exit code

  Returns:
      2 for configuration errors, 3 for numerical failures, 4 for failed checks
  """
  if isinstance(e, ValidationError):
    code = EXIT_CONFIG
  elif isinstance(e, IncoherentonError):
    code = e.exit_code
  else:
    code = EXIT_NUMERICAL

  if debug:
    console.print_exception()
    return code

  if isinstance(e, ValidationError):
    console.print("[red]❌ Invalid configuration:[/red]")
    for error in e.errors():
      location = ".".join(str(part) for part in error["loc"]) or "config"
      console.print(f"   {location}: {error['msg']}")
  elif code == EXIT_CONFIG:
    console.print(f"[red]❌ Invalid arguments:[/red] {e}")
  else:
    console.print(f"[red]❌ {type(e).__name__}:[/red] {e}")
    console.print("   Tip: Use --debug to see full traceback")
  return code


def _setup(verbose: bool, debug: bool) -> None:
  setup_logging(logging.DEBUG if debug else (logging.INFO if verbose else logging.WARNING))


def _resolve(subcommand: str, cli_values: dict[str, Any], config_file: Optional[Path]) -> RunConfig:
  merged = resolve_run_config(cli_values, config_file)
  merged["subcommand"] = subcommand
  return RunConfig.from_dict(merged)


def _execute(subcommand: str, cli_values: dict[str, Any], config_file: Optional[Path], debug: bool, runner: Runner) -> None:
  """Resolve the configuration, run one subcommand and write its manifest"""
  try:
    config = _resolve(subcommand, cli_values, config_file)
    out_dir = Path(config.out)
    with IncoherentonLab(config.model_params(), jobs=config.jobs) as lab:
      files = runner(config, lab, out_dir)
    manifest = write_manifest(out_dir, subcommand, config.model_dump(mode="json"), files, __version__)
  except Exception as e:
    raise typer.Exit(handle_error(e, debug))
  console.print(f"[green]✅ Wrote {len(files)} file(s) and {manifest.name} to {out_dir}[/green]")


def _stem(base: str, config: RunConfig, value: Optional[float] = None) -> str:
  if value is None or config.sweep is None:
    return base
  return f"{base}_{config.sweep.parameter}{value:g}"


def _run_spectrum(config: RunConfig, lab: IncoherentonLab, out_dir: Path) -> list[Path]:
  if config.sweep is not None:
    rows = lab.spectrum.qc_sweep(config.sweep)
    print_rows_as_table(rows, ["param", "n", "gap", "gap_real", "closed"], title="QC gap sweep")
    return [write_rows(out_dir, "qc_sweep", "qc_sweep", rows, config.format)]

  rows = lab.spectrum.rows()
  report = lab.spectrum.qc_gap()
  print_dict_as_table(lab.spectrum.summary(), title="Liouvillian spectrum")
  files = [write_rows(out_dir, "spectrum", "spectrum", rows, config.format), write_json(out_dir / "qc_gap.json", report)]
  if report.ambiguous:
    console.print(f"[yellow]⚠️  {report.n_ambiguous} modes lie close to a group edge[/yellow]")
  return files


def _run_single_particle(config: RunConfig, lab: IncoherentonLab, out_dir: Path) -> list[Path]:
  labs = [(None, lab)] if config.sweep is None else [(v, lab.with_params(**{config.sweep.parameter: v})) for v in config.sweep.values()]
  files = []
  for value, sub in labs:
    rows = sub.single_particle.rows()
    files.append(write_rows(out_dir, _stem("single_particle", config, value), "single_particle", rows, config.format))
  print_dict_as_table(labs[-1][1].single_particle.summary(), title="Single-particle bound states")
  return files


def _initial_state(config: RunConfig) -> InitialState:
  return InitialState(kind=config.initial, k=config.k, delta_n=config.delta_n, seed=config.seed)


def _run_dynamics(config: RunConfig, lab: IncoherentonLab, out_dir: Path) -> list[Path]:
  if config.initial == "random-pure":
    series, rows = lab.dynamics.ensemble(config.ensemble, seed=config.seed, k=config.k, tmax=config.tmax, dt=config.dt, c=config.chi_c)
    print_rows_as_table(rows[:: max(1, len(rows) // 20)], ["t", "chi1", "chi2", "gamma1", "gamma2"], title=f"Ensemble of {config.ensemble}")
    return [write_rows(out_dir, "dynamics", "dynamics", rows, config.format)]

  state = _initial_state(config)
  if config.sweep is not None:
    points = lab.dynamics.relaxation_sweep(config.sweep, state, tmax=config.tmax, dt=config.dt, c=config.chi_c)
    files = [write_rows(out_dir, _stem("dynamics", config, p.value), "dynamics", p.rows, config.format) for p in points]
    fits = [p.fit for p in points]
    files.append(write_json(out_dir / "fits.json", fits))
    print_rows_as_table([f.model_dump() for f in fits], ["J", "k", "fit_kind", "rate_or_omega", "r2"], title="Relaxation fits")
    return files

  trajectory = lab.dynamics.evolve(state, lab.dynamics.times(config.tmax), method=config.method, dt=config.dt)
  fit = lab.dynamics.fit(trajectory, config.k)
  print_model_as_table(fit, title="Relaxation fit")
  return [write_rows(out_dir, "dynamics", "dynamics", lab.dynamics.rows(trajectory, config.k, config.chi_c), config.format), write_json(out_dir / "fit.json", fit)]


def _run_bethe(config: RunConfig, lab: IncoherentonLab, out_dir: Path) -> list[Path]:
  rows = lab.bethe.string_rows(config.m, config.scan_p, config.residual_L)
  missing = [row["p"] for row in rows if not row["exists"]]
  summary = {
    "m": config.m,
    "J": config.J,
    "gamma": config.gamma,
    "strings_found": len(rows) - len(missing),
    "no_solution_from": min(missing) if missing else None,
    "no_solution_to": max(missing) if missing else None,
  }
  print_dict_as_table(summary, title="k-Lambda strings")
  files = [write_rows(out_dir, "strings", strings_schema(config.residual_L), rows, config.format)]
  if config.L <= 6:
    files.append(write_json(out_dir / "ladder.json", lab.bethe.ladder_report()))
  return files


def _run_toydos(config: RunConfig, lab: IncoherentonLab, out_dir: Path) -> list[Path]:
  params = lab.toydos.params(eta=config.eta, delta=config.delta, a0=config.a0, a1=config.a1)
  rows = lab.toydos.rows(params)
  plateaus = lab.toydos.plateaus(params)
  print_dict_as_table({name: window for name, window in plateaus.items()}, title="Gamma_1 plateaus")
  return [write_rows(out_dir, "toydos", "toydos", rows, config.format), write_json(out_dir / "plateaus.json", {"params": params, "plateaus": plateaus})]


@app.command("spectrum")
def spectrum(  # type: ignore[no-untyped-def]
  model: Optional[str] = model_option,
  sites: Optional[int] = sites_option,
  particles: Optional[int] = particles_option,
  hopping: Optional[float] = hopping_option,
  gamma: Optional[float] = gamma_option,
  interaction: Optional[float] = interaction_option,
  sweep: Optional[str] = sweep_option,
  out: Optional[str] = out_option,
  fmt: Optional[str] = format_option,
  jobs: Optional[int] = jobs_option,
  config: Optional[Path] = config_option,
  verbose: bool = verbose_option,
  debug: bool = debug_option,
):
  """Diagonalize the Liouvillian and classify its eigenmodes"""
  _setup(verbose, debug)
  values = {"model": model, "L": sites, "N": particles, "J": hopping, "gamma": gamma, "U": interaction, "sweep": sweep, "out": out, "format": fmt, "jobs": jobs}
  _execute("spectrum", values, config, debug, _run_spectrum)


@app.command("single-particle")
def single_particle(  # type: ignore[no-untyped-def]
  sites: Optional[int] = sites_option,
  hopping: Optional[float] = hopping_option,
  gamma: Optional[float] = gamma_option,
  sweep: Optional[str] = sweep_option,
  out: Optional[str] = out_option,
  fmt: Optional[str] = format_option,
  config: Optional[Path] = config_option,
  verbose: bool = verbose_option,
  debug: bool = debug_option,
):
  """Bound states of the one-particle momentum blocks over the k grid"""
  _setup(verbose, debug)
  values = {"model": "hardcore", "N": 1, "L": sites, "J": hopping, "gamma": gamma, "sweep": sweep, "out": out, "format": fmt}
  _execute("single-particle", values, config, debug, _run_single_particle)


@app.command("dynamics")
def dynamics(  # type: ignore[no-untyped-def]
  model: Optional[str] = model_option,
  sites: Optional[int] = sites_option,
  particles: Optional[int] = particles_option,
  hopping: Optional[float] = hopping_option,
  gamma: Optional[float] = gamma_option,
  interaction: Optional[float] = interaction_option,
  k: Optional[float] = k_option,
  delta_n: Optional[float] = delta_n_option,
  tmax: Optional[float] = tmax_option,
  dt: Optional[float] = dt_option,
  seed: Optional[int] = seed_option,
  ensemble: Optional[int] = ensemble_option,
  initial: Annotated[Optional[str], typer.Option("--initial", help="density-modulated | random-pure")] = None,
  method: Annotated[Optional[str], typer.Option("--method", help="integrate | expansion")] = None,
  chi_c: Annotated[Optional[float], typer.Option("--chi-c", help="Distance weight c of chi1_tilde")] = None,
  sweep: Optional[str] = sweep_option,
  out: Optional[str] = out_option,
  fmt: Optional[str] = format_option,
  jobs: Optional[int] = jobs_option,
  config: Optional[Path] = config_option,
  verbose: bool = verbose_option,
  debug: bool = debug_option,
):
  """Evolve density matrices and fit the relaxation of the density modulation"""
  _setup(verbose, debug)
  values = {
    "model": model,
    "L": sites,
    "N": particles,
    "J": hopping,
    "gamma": gamma,
    "U": interaction,
    "k": k,
    "delta_n": delta_n,
    "tmax": tmax,
    "dt": dt,
    "seed": seed,
    "ensemble": ensemble,
    "initial": initial,
    "method": method,
    "chi_c": chi_c,
    "sweep": sweep,
    "out": out,
    "format": fmt,
    "jobs": jobs,
  }
  _execute("dynamics", values, config, debug, _run_dynamics)


@app.command("bethe")
def bethe(  # type: ignore[no-untyped-def]
  m: Annotated[Optional[int], typer.Option("--m", help="String order")] = None,
  scan_p: Annotated[Optional[int], typer.Option("--scan-p", help="Number of p grid intervals on (-pi, 0)")] = None,
  residual_l: Annotated[Optional[str], typer.Option("--residual-L", help="Comma-separated ring lengths for Bethe residuals")] = None,
  sites: Optional[int] = sites_option,
  particles: Optional[int] = particles_option,
  hopping: Optional[float] = hopping_option,
  gamma: Optional[float] = gamma_option,
  out: Optional[str] = out_option,
  fmt: Optional[str] = format_option,
  config: Optional[Path] = config_option,
  verbose: bool = verbose_option,
  debug: bool = debug_option,
):
  """Scan k-Lambda strings over p; with --L <= 6 also check eta pairing on the Hubbard ladder"""
  _setup(verbose, debug)
  values = {
    "model": "hardcore",
    "m": m,
    "scan_p": scan_p,
    "residual_L": residual_l,
    "L": sites,
    "N": particles,
    "J": hopping,
    "gamma": gamma,
    "out": out,
    "format": fmt,
  }
  _execute("bethe", values, config, debug, _run_bethe)


@app.command("toydos")
def toydos(  # type: ignore[no-untyped-def]
  eta: Annotated[Optional[float], typer.Option("--eta", help="Low-band exponent")] = None,
  delta: Annotated[Optional[float], typer.Option("--delta", help="Width of both bands")] = None,
  a0: Annotated[Optional[float], typer.Option("--a0", help="Low-band weight")] = None,
  a1: Annotated[Optional[float], typer.Option("--a1", help="Upper-band weight")] = None,
  gamma: Optional[float] = gamma_option,
  out: Optional[str] = out_option,
  fmt: Optional[str] = format_option,
  config: Optional[Path] = config_option,
  verbose: bool = verbose_option,
  debug: bool = debug_option,
):
  """Gamma_1(t) of the two-band density-of-states model"""
  _setup(verbose, debug)
  values = {"eta": eta, "delta": delta, "a0": a0, "a1": a1, "gamma": gamma, "L": 2, "N": 1, "J": 0.0, "out": out, "format": fmt}
  _execute("toydos", values, config, debug, _run_toydos)


@app.command("check")
def check(  # type: ignore[no-untyped-def]
  include_slow: Annotated[bool, typer.Option("--include-slow", help="Also run the heavy acceptance gates")] = False,
  only: Annotated[Optional[list[str]], typer.Option("--only", help="Run only the named check (repeatable)")] = None,
  out: Annotated[Optional[Path], typer.Option("--out", help="Write results to this JSON file")] = None,
  verbose: bool = verbose_option,
  debug: bool = debug_option,
):
  """Run acceptance gates; exit code 4 when any fails"""
  _setup(verbose, debug)
  try:
    results = run_checks(include_slow=include_slow, only=only)
    if out is not None:
      write_json(out, results)
  except Exception as e:
    raise typer.Exit(handle_error(e, debug))

  print_checks_as_table(results)
  try:
    require_passed(results)
  except CheckFailedError as e:
    raise typer.Exit(handle_error(e, debug))
  console.print(f"[green]✅ All {len(results)} checks passed![/green]")


@app.command("configure")
def configure(  # type: ignore[no-untyped-def]
  assignments: Annotated[Optional[list[str]], typer.Option("--set", help="Store a default, key=value (repeatable)")] = None,
  show: Annotated[bool, typer.Option("--show", help="Show current configuration")] = False,
):
  """Manage user defaults"""
  try:
    if show or not assignments:
      current = load_config()
      if current:
        console.print(f"[cyan]Current configuration ({CONFIG_PATH}):[/cyan]")
        for key, value in current.items():
          console.print(f"  {key} = {value}")
      else:
        console.print("[yellow]No configuration found.[/yellow]")
        console.print("  Use: incoh configure --set gamma=1.0 --set jobs=4")
      return

    values = dict(parse_assignment(text) for text in assignments)
    RunConfig.from_dict({"subcommand": "configure", **values})
    path = save_config(values)
  except Exception as e:
    raise typer.Exit(handle_error(e))
  console.print(f"[green]✅ Configuration saved to {path}[/green]")


def cli() -> None:
  """CLI entry point for setuptools"""
  app()


if __name__ == "__main__":
  app()
