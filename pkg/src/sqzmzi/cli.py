"""Command-line interface: phase sweeps, design reports, oracle validation.

Parameter sources merge in a fixed order: preset defaults, then a config file,
then explicit command-line flags (later sources win key by key).  Squeezing can
be given in dB (variance convention, 10 log10 e^{2r}) or as a raw factor r, but
not both.  All machine-readable output uses 12 significant digits and the
literal ``inf`` for divergent uncertainties.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from pathlib import Path

import click

from . import oracle as oracle_mod
from .model import (
    InterferometerParams,
    ParameterError,
    Strategy,
    StrategyKind,
    db_to_squeeze_factor,
    inefficiency,
    squeeze_factor_to_db,
    technical_noise_factor,
)
from .oracle import OracleConfig
from .sensitivity import (
    apriori_tolerance,
    dphi_min,
    fwhm,
    fwhm_approx,
    implied_inefficiency,
    k_factor,
    phase_uncertainty,
    snl,
)

OUTPUT_DIR_ENV = "SQZMZI_OUTPUT_DIR"

CSV_HEADER = "phi,strategy,dphi,dphi_normalized,k_opt"

DEFAULT_STRATEGIES = ("single", "differential", "optimal")

# named parameter sets reproducing the package's reference sensitivity curves
PRESETS: dict[str, dict[str, float]] = {
    # 10 dB input squeezing, lossless, coherent-level excess noise
    "fig2-solid": {"r1_db": 10.0, "mu": 1.0, "eta": 1.0, "n_photons": 1e6, "a_factor": 1.0},
    # same squeezing with external loss giving eps^2 = 0.04
    "fig2-dashed": {"r1_db": 10.0, "mu": 1.0, "eta": 1.0 / 1.04, "n_photons": 1e6, "a_factor": 1.0},
    # lossless but doubled excess photon-number noise
    "fig2-dotted": {"r1_db": 10.0, "mu": 1.0, "eta": 1.0, "n_photons": 1e6, "a_factor": 2.0},
}

_PARAM_KEYS = ("r1", "r1_db", "r2", "r2_db", "mu", "eta", "n_photons", "g2", "a_factor")
_GRID_KEYS = ("phi_start", "phi_end", "points", "strategy", "phi_apr", "format")
_ORACLE_KEYS = ("oracle_samples", "seed", "z_threshold", "mode")
_EXCLUSIVE_GROUPS = (("r1", "r1_db"), ("r2", "r2_db"), ("g2", "a_factor"))

_FLOAT_KEYS = {
    "r1",
    "r1_db",
    "r2",
    "r2_db",
    "mu",
    "eta",
    "n_photons",
    "g2",
    "a_factor",
    "phi_start",
    "phi_end",
    "phi_apr",
    "z_threshold",
}
_INT_KEYS = {"points", "oracle_samples", "seed"}


def _fmt(x: float) -> str:
    if math.isinf(x):
        return "inf"
    return f"{x:.12g}"


@dataclass(frozen=True)
class SweepSpec:
    """A phase sweep request: parameter set, grid, strategies, output format."""

    params: InterferometerParams
    phi_start: float = 0.0
    phi_end: float = 2.0 * math.pi
    n_points: int = 721
    strategies: tuple[Strategy, ...] = ()
    output_format: str = "csv"
    oracle: OracleConfig | None = None

    def __post_init__(self) -> None:
        if not (math.isfinite(self.phi_start) and math.isfinite(self.phi_end)):
            raise ParameterError("phi_start and phi_end must be finite")
        if self.phi_end <= self.phi_start:
            raise ParameterError(
                f"phi_end must exceed phi_start, got [{self.phi_start}, {self.phi_end}]"
            )
        if self.n_points < 2:
            raise ParameterError(f"a sweep needs at least 2 grid points, got {self.n_points}")
        if not self.strategies:
            raise ParameterError("at least one strategy is required")
        if self.output_format not in ("csv", "json"):
            raise ParameterError(f"unknown output format {self.output_format!r}")

    def grid(self) -> list[float]:
        step = (self.phi_end - self.phi_start) / (self.n_points - 1)
        return [self.phi_start + i * step for i in range(self.n_points)]


def sweep(spec: SweepSpec) -> list[dict]:
    """Evaluate every (phi, strategy) pair of the sweep; rows in grid order."""
    rows = []
    for phi in spec.grid():
        for strategy in spec.strategies:
            res = phase_uncertainty(strategy, spec.params, phi)
            rows.append(
                {
                    "phi": phi,
                    "strategy": strategy.kind.value,
                    "dphi": res.dphi,
                    "dphi_normalized": res.normalized,
                    "k_opt": res.k_opt,
                }
            )
    return rows


def render_csv(rows: list[dict]) -> str:
    lines = [CSV_HEADER]
    for row in rows:
        k_opt = "" if row["k_opt"] is None else _fmt(row["k_opt"])
        lines.append(
            f"{_fmt(row['phi'])},{row['strategy']},{_fmt(row['dphi'])},"
            f"{_fmt(row['dphi_normalized'])},{k_opt}"
        )
    return "\n".join(lines) + "\n"


def render_json(rows: list[dict]) -> str:
    def convert(value):
        if isinstance(value, float) and not math.isfinite(value):
            return "inf"
        return value

    payload = [{key: convert(val) for key, val in row.items()} for row in rows]
    return json.dumps(payload, indent=2) + "\n"


def validate_against_oracle(
    spec: SweepSpec, z_threshold: float = 5.0
) -> tuple[list[dict], dict[str, float], bool]:
    """Run the Monte-Carlo oracle at every grid point of ``spec``.

    Returns (per-point rows, per-moment max |z| over the grid, overall pass).
    """
    if spec.oracle is None:
        raise ParameterError("the sweep spec carries no oracle configuration")
    if not (math.isfinite(z_threshold) and z_threshold > 0.0):
        raise ParameterError(f"z threshold must be > 0, got {z_threshold!r}")
    rows = []
    worst: dict[str, float] = {}
    for phi in spec.grid():
        report = oracle_mod.run(spec.params, phi, spec.oracle)
        point_worst = 0.0
        point_moment = ""
        for name, z in report.z_scores.items():
            az = abs(z)
            if az > worst.get(name, 0.0):
                worst[name] = az
            if az > point_worst:
                point_worst = az
                point_moment = name
        rows.append({"phi": phi, "max_abs_z": point_worst, "worst_moment": point_moment})
    passed = all(v <= z_threshold for v in worst.values())
    return rows, worst, passed


def _read_config(path: str) -> dict:
    """Parse a ``key = value`` config file ('#' starts a comment)."""
    values: dict = {}
    known = set(_PARAM_KEYS) | set(_GRID_KEYS) | set(_ORACLE_KEYS)
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise click.UsageError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, text = line.partition("=")
        key = key.strip().lower().replace("-", "_")
        if key == "a":
            key = "a_factor"
        text = text.strip()
        if key not in known:
            raise click.UsageError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            if key in _FLOAT_KEYS:
                values[key] = float(text)
            elif key in _INT_KEYS:
                values[key] = int(text)
            else:
                values[key] = text
        except ValueError:
            raise click.UsageError(f"{path}:{lineno}: bad value for {key}: {text!r}") from None
    return values


def _apply_layer(values: dict, layer: dict, source: str) -> None:
    for group in _EXCLUSIVE_GROUPS:
        present = [k for k in group if k in layer]
        if len(present) > 1:
            raise click.UsageError(f"{source}: give only one of {' / '.join(present)}")
    siblings = {k: g for g in _EXCLUSIVE_GROUPS for k in g}
    for key, val in layer.items():
        for other in siblings.get(key, ()):
            if other != key:
                values.pop(other, None)
        values[key] = val


def _collect(ctx: click.Context, preset: str | None, config: str | None, cli_layer: dict) -> dict:
    values: dict = {}
    if preset is not None:
        _apply_layer(values, PRESETS[preset], f"preset {preset}")
    if config is not None:
        _apply_layer(values, _read_config(config), config)
    provided = {
        key: val
        for key, val in cli_layer.items()
        if ctx.get_parameter_source(key) == click.core.ParameterSource.COMMANDLINE
    }
    _apply_layer(values, provided, "command line")
    return values


def _params_from(values: dict) -> InterferometerParams:
    kwargs: dict = {}
    try:
        if "r1_db" in values:
            kwargs["r1"] = db_to_squeeze_factor(values["r1_db"])
        elif "r1" in values:
            kwargs["r1"] = values["r1"]
        if "r2_db" in values:
            kwargs["r2"] = db_to_squeeze_factor(values["r2_db"])
        elif "r2" in values:
            kwargs["r2"] = values["r2"]
        for key in ("mu", "eta", "n_photons"):
            if key in values:
                kwargs[key] = values[key]
        if "a_factor" in values:
            return InterferometerParams.with_technical_noise(values["a_factor"], **kwargs)
        if "g2" in values:
            kwargs["g2"] = values["g2"]
        return InterferometerParams(**kwargs)
    except ParameterError as exc:
        raise click.UsageError(str(exc)) from exc


def _strategies_from(values: dict) -> tuple[Strategy, ...]:
    raw = values.get("strategy") or DEFAULT_STRATEGIES
    if isinstance(raw, str):
        raw = tuple(part.strip() for part in raw.split(",") if part.strip())
    out = []
    for name in raw:
        if name == "suboptimal":
            if "phi_apr" not in values:
                raise click.UsageError("the suboptimal strategy needs --phi-apr")
            out.append(Strategy.suboptimal(values["phi_apr"]))
        elif name == "single":
            out.append(Strategy.single())
        elif name == "differential":
            out.append(Strategy.differential())
        elif name == "optimal":
            out.append(Strategy.optimal())
        else:
            raise click.UsageError(f"unknown strategy {name!r}")
    return tuple(out)


def _write_output(text: str, output: str | None) -> None:
    if output is None:
        click.echo(text, nl=False)
        return
    path = Path(output)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not path.is_absolute():
        path = Path(base) / path
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def _param_options(f):
    options = [
        click.option("--preset", type=click.Choice(sorted(PRESETS)), default=None,
                     help="Start from a named parameter set."),
        click.option("--config", "config_file", type=click.Path(exists=True, dir_okay=False),
                     default=None, help="key = value file; flags override it."),
        click.option("--r1-db", type=float, help="Input squeezing in dB (10 log10 e^{2 r1})."),
        click.option("--r1", type=float, help="Input squeeze factor r1 (raw)."),
        click.option("--r2-db", type=float, help="Output amplifier gain in dB."),
        click.option("--r2", type=float, help="Output amplifier gain r2 (raw)."),
        click.option("--mu", type=float, help="Internal power transmissivity, (0, 1]."),
        click.option("--eta", type=float, help="External transmissivity, (0, 1]."),
        click.option("--n-photons", type=float, help="Mean photon number N of the bright input."),
        click.option("--g2", type=float, help="Degree of second-order coherence of the laser."),
        click.option("--A", "a_factor", type=float,
                     help="Excess-noise factor A = N(g2 - 1) + 1 (alternative to --g2)."),
    ]
    for opt in reversed(options):
        f = opt(f)
    return f


@click.group()
@click.version_option(package_name="sqzmzi")
def main() -> None:
    """Phase sensitivity of a squeezing-assisted Mach-Zehnder interferometer."""


@main.command(name="sweep")
@_param_options
@click.option("--phi-start", type=float, default=0.0, show_default=True,
              help="First phase of the grid (rad).")
@click.option("--phi-end", type=float, default=2.0 * math.pi, show_default="2 pi",
              help="Last phase of the grid (rad).")
@click.option("--points", type=int, default=721, show_default=True, help="Grid size.")
@click.option("--strategy", "strategy", multiple=True,
              type=click.Choice(["single", "differential", "optimal", "suboptimal"]),
              help="Strategy to evaluate (repeatable); default: single differential optimal.")
@click.option("--phi-apr", type=float, help="A-priori phase for the suboptimal strategy (rad).")
@click.option("--format", "output_format", type=click.Choice(["csv", "json"]), default="csv",
              show_default=True)
@click.option("--output", "-o", type=click.Path(dir_okay=False), default=None,
              help=f"Output file (relative paths resolve under ${OUTPUT_DIR_ENV}).")
@click.pass_context
def sweep_cmd(ctx, preset, config_file, output, **cli_layer) -> None:
    """Tabulate phase uncertainty over a phase grid."""
    values = _collect(ctx, preset, config_file, cli_layer)
    params = _params_from(values)
    try:
        spec = SweepSpec(
            params=params,
            phi_start=float(values.get("phi_start", 0.0)),
            phi_end=float(values.get("phi_end", 2.0 * math.pi)),
            n_points=int(values.get("points", 721)),
            strategies=_strategies_from(values),
            output_format=str(values.get("output_format") or values.get("format") or "csv"),
        )
    except ParameterError as exc:
        raise click.UsageError(str(exc)) from exc
    rows = sweep(spec)
    text = render_csv(rows) if spec.output_format == "csv" else render_json(rows)
    _write_output(text, output)


@main.command(name="report")
@_param_options
@click.option("--implied-gain-db", type=float, default=None,
              help="Also solve for the eps^2 implied by this measured gain.")
@click.option("--format", "output_format", type=click.Choice(["text", "json"]), default="text",
              show_default=True)
@click.option("--output", "-o", type=click.Path(dir_okay=False), default=None)
@click.pass_context
def report_cmd(ctx, preset, config_file, implied_gain_db, output, **cli_layer) -> None:
    """Summarize the design quantities of one parameter set."""
    values = _collect(ctx, preset, config_file, cli_layer)
    params = _params_from(values)
    floor = dphi_min(params)
    shot = snl(params.n_photons)
    gain_db = -20.0 * math.log10(floor / shot)
    quantities = {
        "r1": params.r1,
        "r1_db": squeeze_factor_to_db(params.r1),
        "r2": params.r2,
        "r2_db": squeeze_factor_to_db(params.r2),
        "mu": params.mu,
        "eta": params.eta,
        "n_photons": params.n_photons,
        "g2": params.g2,
        "technical_noise_factor": technical_noise_factor(params),
        "eps2": inefficiency(params),
        "dphi_snl": shot,
        "dphi_min": floor,
        "dphi_min_normalized": floor / shot,
        "sensitivity_gain_db": gain_db,
        "k_factor": k_factor(params),
        "fwhm_single": fwhm(Strategy.single(), params),
        "fwhm_single_approx": fwhm_approx(Strategy.single(), params),
        "fwhm_differential": fwhm(Strategy.differential(), params),
        "fwhm_differential_approx": fwhm_approx(Strategy.differential(), params),
        "apriori_tolerance": apriori_tolerance(params),
    }
    if implied_gain_db is not None:
        try:
            quantities["implied_eps2"] = implied_inefficiency(params.r1, implied_gain_db)
        except ParameterError as exc:
            raise click.UsageError(str(exc)) from exc
    fmt = str(values.get("output_format") or values.get("format") or "text")
    if fmt == "json":
        text = json.dumps(quantities, indent=2) + "\n"
    else:
        q = quantities
        lines = [
            "interferometer parameters",
            f"  input squeezing r1        {q['r1']:.6f}  ({q['r1_db']:.3f} dB, variance convention 10 log10 e^(2 r1))",
            f"  output amplifier r2       {q['r2']:.6f}  ({q['r2_db']:.3f} dB, variance convention 10 log10 e^(2 r2))",
            f"  internal transmissivity   {q['mu']:.6g}",
            f"  external transmissivity   {q['eta']:.6g}",
            f"  photon number N           {q['n_photons']:.6g}",
            f"  g2                        {q['g2']:.12g}",
            f"  excess noise factor A     {q['technical_noise_factor']:.6g}",
            "derived sensitivity figures",
            f"  inefficiency eps^2        {q['eps2']:.6g}",
            f"  dphi_snl                  {q['dphi_snl']:.6e} rad  (shot-noise limit)",
            f"  dphi_min                  {q['dphi_min']:.6e} rad",
            f"  dphi_min / dphi_snl       {q['dphi_min_normalized']:.6f}",
            f"  sensitivity gain          {q['sensitivity_gain_db']:.3f} dB  (amplitude convention, -20 log10(dphi_min/dphi_snl))",
            f"  deterioration factor K    {q['k_factor']:.6e} rad^2",
            f"  FWHM single               {q['fwhm_single']:.6f} rad  (1 lobe per 2 pi; approx {q['fwhm_single_approx']:.6f})",
            f"  FWHM differential         {q['fwhm_differential']:.6f} rad  (2 lobes per 2 pi; approx {q['fwhm_differential_approx']:.6f})",
            f"  a-priori phase tolerance  {q['apriori_tolerance']:.6f} rad",
        ]
        if "implied_eps2" in quantities:
            lines.append(
                f"  implied eps^2             {q['implied_eps2']:.6g}  (from a measured gain of {implied_gain_db:g} dB)"
            )
        text = "\n".join(lines) + "\n"
    _write_output(text, output)


@main.command(name="validate")
@_param_options
@click.option("--phi-start", type=float, default=0.0, show_default=True)
@click.option("--phi-end", type=float, default=2.0 * math.pi, show_default="2 pi")
@click.option("--points", type=int, default=12, show_default=True)
@click.option("--oracle-samples", type=int, default=100_000, show_default=True,
              help="Monte-Carlo samples per grid point.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--mode", type=click.Choice(["linearized", "exact"]), default="linearized",
              show_default=True, help="Detection model used by the oracle.")
@click.option("--no-vacuum-offset", is_flag=True, default=False,
              help="Exact mode: drop the -1/2 vacuum subtraction per detector.")
@click.option("--z-threshold", type=float, default=5.0, show_default=True,
              help="Maximum tolerated |z| per moment.")
@click.pass_context
def validate_cmd(ctx, preset, config_file, no_vacuum_offset, **cli_layer) -> None:
    """Check the closed-form moments against the Monte-Carlo oracle."""
    values = _collect(ctx, preset, config_file, cli_layer)
    params = _params_from(values)
    threshold = float(values.get("z_threshold", 5.0))
    mode = str(values.get("mode", "linearized"))
    try:
        spec = SweepSpec(
            params=params,
            phi_start=float(values.get("phi_start", 0.0)),
            phi_end=float(values.get("phi_end", 2.0 * math.pi)),
            n_points=int(values.get("points", 12)),
            strategies=(Strategy.optimal(),),  # strategies are irrelevant to moments
            output_format="csv",
            oracle=OracleConfig(
                n_samples=int(values.get("oracle_samples", 100_000)),
                seed=int(values.get("seed", 0)),
                include_vacuum_offset=not no_vacuum_offset,
                linearized_mode=(mode == "linearized"),
            ),
        )
        rows, worst, passed = validate_against_oracle(spec, z_threshold=threshold)
    except ParameterError as exc:
        raise click.UsageError(str(exc)) from exc
    click.echo(f"oracle validation, {mode} mode, {spec.oracle.n_samples} samples per point")
    click.echo(f"{'phi':>12}  {'max |z|':>10}  worst moment")
    for row in rows:
        click.echo(f"{row['phi']:12.6f}  {row['max_abs_z']:10.3f}  {row['worst_moment']}")
    click.echo("per-moment max |z| over the grid:")
    for name in sorted(worst):
        click.echo(f"  {name:12s} {worst[name]:10.3f}")
    if passed:
        click.echo(f"PASS: all moments within |z| <= {threshold:g}")
    else:
        click.echo(f"FAIL: some moment exceeds |z| = {threshold:g}")
        ctx.exit(1)


if __name__ == "__main__":
    main()
