"""Command-line front end for the moment-to-density pipeline.

Subcommands cover simulation of noisy moment files, the reciprocal
transform, per-diagonal density fitting at a probe point, lattice
estimation of the condensed density for zeros and poles (single realization
or Monte Carlo), and comparison of a saved expansion dump against fresh
samples.  Every command is a pure function of (config, input files, seed):
rerunning with the same inputs produces byte-identical outputs.

Configuration is a flat ``key = value`` text file; command-line flags
override file values, which override the built-in defaults (74 moments,
noise 0.2, a 100 x 100 lattice over [-1.2, 1.2]^2, probe cos(1) + 0.8i,
and the bundled five-atom demo measure).
"""

from __future__ import annotations

import argparse
import dataclasses
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import condensed, laguerre, pencil, transform
from .measure import (
    NoiseModel,
    demo_measure,
    exact_moments,
    read_measure_file,
    sample_moment_stack,
    sample_moments,
    write_measure_file,
)

__all__ = ["ConfigError", "RunConfig", "main", "console_main"]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_IO = 4

_NUMERIC_ERRORS = (
    transform.IllConditionedTransformError,
    pencil.SingularPencilError,
    laguerre.UnderdispersedMomentsError,
    condensed.NormalizationError,
    np.linalg.LinAlgError,
)


class ConfigError(Exception):
    """Invalid or inconsistent run configuration."""


@dataclass
class RunConfig:
    measure: str | None = None
    n: int = 74
    sigma: float = 0.2
    seed: int = 0
    order: int | None = None
    kind: str = "zero"
    x_min: float = -1.2
    x_max: float = 1.2
    y_min: float = -1.2
    y_max: float = 1.2
    grid_size: int = 100
    beta_smooth: float | None = None
    realizations: int = 100
    laguerre_order: int = 10
    z_probe_re: float = math.cos(1.0)
    z_probe_im: float = 0.8
    out: str = "out"

    @property
    def z_probe(self) -> complex:
        return complex(self.z_probe_re, self.z_probe_im)

    def load_measure(self):
        if self.measure is None:
            return demo_measure()
        path = Path(self.measure)
        if not path.exists():
            raise ConfigError(f"measure file not found: {path}")
        return read_measure_file(path)

    def noise(self) -> NoiseModel:
        return NoiseModel(sigma=self.sigma, seed=self.seed)

    def pencil_order(self) -> int:
        if self.order is not None:
            return self.order
        return pencil.default_order(self.n, self.kind)

    def smoothing(self) -> float:
        return self.beta_smooth if self.beta_smooth is not None else 5.0 * self.n

    def grid(self) -> condensed.GridSpec:
        return condensed.GridSpec(
            x_min=self.x_min, x_max=self.x_max,
            y_min=self.y_min, y_max=self.y_max, m=self.grid_size,
        )

    def out_dir(self) -> Path:
        path = Path(self.out)
        path.mkdir(parents=True, exist_ok=True)
        return path


_FIELD_TYPES = {f.name: f for f in dataclasses.fields(RunConfig)}
_OPTIONAL_FLOATS = {"beta_smooth"}
_OPTIONAL_STRINGS = {"measure"}
_INT_FIELDS = {"n", "seed", "order", "grid_size", "realizations", "laguerre_order"}
_FLOAT_FIELDS = {
    "sigma", "x_min", "x_max", "y_min", "y_max",
    "beta_smooth", "z_probe_re", "z_probe_im",
}


def _coerce(key: str, raw: str):
    raw = raw.strip()
    if key in _INT_FIELDS:
        return int(raw)
    if key in _FLOAT_FIELDS:
        return float(raw)
    return raw


def parse_config_file(path) -> dict:
    """Flat ``key = value`` pairs; blank lines and ``#`` comments ignored."""
    values = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            key, _, value = line.partition("=")
            key = key.strip()
            if key not in _FIELD_TYPES:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            try:
                values[key] = _coerce(key, value)
            except ValueError as exc:
                raise ConfigError(f"{path}:{lineno}: {exc}") from exc
    return values


def build_config(args: argparse.Namespace) -> RunConfig:
    values: dict = {}
    if args.config is not None:
        cfg_path = Path(args.config)
        if not cfg_path.exists():
            raise ConfigError(f"config file not found: {cfg_path}")
        values.update(parse_config_file(cfg_path))
    for key in _FIELD_TYPES:
        flag_value = getattr(args, key, None)
        if flag_value is not None:
            values[key] = flag_value
    try:
        cfg = RunConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    _validate(cfg)
    return cfg


def _validate(cfg: RunConfig) -> None:
    if cfg.n < 1:
        raise ConfigError("n must be >= 1")
    if cfg.sigma < 0 or not math.isfinite(cfg.sigma):
        raise ConfigError("sigma must be finite and >= 0")
    if cfg.kind not in ("pole", "zero"):
        raise ConfigError("kind must be 'pole' or 'zero'")
    if cfg.order is not None and cfg.order < 1:
        raise ConfigError("order must be >= 1")
    if cfg.grid_size < 3:
        raise ConfigError("grid_size must be >= 3")
    if cfg.beta_smooth is not None and cfg.beta_smooth <= 0:
        raise ConfigError("beta_smooth must be > 0")
    if cfg.realizations < 1:
        raise ConfigError("realizations must be >= 1")
    if cfg.laguerre_order < 0:
        raise ConfigError("laguerre_order must be >= 0")


# ---------------------------------------------------------------------------
# commands


def cmd_simulate(cfg: RunConfig) -> list[Path]:
    """Write the noiseless sequence plus one file per noisy realization."""
    measure = cfg.load_measure()
    noise = cfg.noise()
    out = cfg.out_dir()
    written = []
    measure_path = out / "measure.txt"
    write_measure_file(measure, measure_path)
    written.append(measure_path)
    noiseless = exact_moments(measure, cfg.n)
    path = out / "moments_noiseless.csv"
    transform.write_moment_csv(noiseless, path)
    written.append(path)
    for r in range(cfg.realizations):
        ms = sample_moments(measure, cfg.n, noise, realization=r)
        path = out / f"moments_r{r:05d}.csv"
        transform.write_moment_csv(ms, path)
        written.append(path)
    return written


def cmd_transform(cfg: RunConfig, input_path) -> Path:
    """Apply the reciprocal transform to a moment file."""
    src = Path(input_path)
    if not src.exists():
        raise ConfigError(f"input moments file not found: {src}")
    moments = transform.read_moment_csv(src)
    result = transform.reciprocal_moments(moments)
    out = cfg.out_dir() / f"{src.stem}_transformed.csv"
    transform.write_moment_csv(result, out)
    return out


def _diagonal_sample_matrix(cfg: RunConfig) -> np.ndarray:
    measure = cfg.load_measure()
    stack = sample_moment_stack(measure, cfg.n, cfg.noise(), cfg.realizations)
    seq = transform.reciprocal_coefficients(stack) if cfg.kind == "zero" else stack
    return pencil.diagonal_samples(seq, cfg.pencil_order(), cfg.kind, cfg.z_probe)


def cmd_fit_density(cfg: RunConfig) -> tuple[Path, Path]:
    """Fit per-diagonal expansions at the probe point; dump fits and fit quality.

    Emits one expansion row and one comparison row per diagonal index; an
    index whose empirical moments cannot support a Gamma fit gets a warning
    row in the comparison table instead of aborting the run.
    """
    if cfg.realizations < 100:
        raise ConfigError("fit-density needs at least 100 realizations")
    samples = _diagonal_sample_matrix(cfg)
    out = cfg.out_dir()
    dump_rows = []
    table_rows = []
    for k in range(1, samples.shape[1] + 1):
        column = samples[:, k - 1]
        try:
            moments = laguerre.EmpiricalMoments.from_samples(column, cfg.laguerre_order)
            fit = laguerre.fit_gamma(moments)
            expansion = laguerre.expansion_coefficients(moments, fit, cfg.laguerre_order)
        except laguerre.UnderdispersedMomentsError:
            table_rows.append((k, "underdispersed", "", "", "", ""))
            continue
        l2_one = laguerre.histogram_l2(expansion, column, order=0)
        l2_full = laguerre.histogram_l2(expansion, column)
        dump_rows.append((k, expansion))
        table_rows.append(
            (k, "ok", f"{fit.shape:.17g}", f"{fit.scale:.17g}",
             f"{l2_one:.17g}", f"{l2_full:.17g}")
        )
    if not dump_rows:
        raise laguerre.UnderdispersedMomentsError("no diagonal index produced a fit")
    dump_path = out / "expansions.csv"
    laguerre.write_expansion_csv(dump_rows, dump_path)
    table_path = out / "density_fit.csv"
    _write_table(
        table_path,
        ["k", "status", "alpha", "beta", "l2_one_term", "l2_full_series"],
        table_rows,
    )
    return dump_path, table_path


def cmd_estimate(cfg: RunConfig, kind: str, mode: str) -> list[Path]:
    """Condensed-density estimate; writes grids, a graymap, and modes."""
    if cfg.sigma <= 0:
        raise ConfigError("density estimation requires sigma > 0")
    order = cfg.order if cfg.order is not None else pencil.default_order(cfg.n, kind)
    est_cfg = condensed.EstimatorConfig(
        sigma=cfg.sigma, beta_smooth=cfg.smoothing(), order=order, kind=kind
    )
    measure = cfg.load_measure()
    noise = cfg.noise()
    spec = cfg.grid()
    if mode == "montecarlo":
        stack = sample_moment_stack(measure, cfg.n, noise, cfg.realizations)
        estimate = condensed.estimate_condensed(list(stack), est_cfg, spec, mode="montecarlo")
        prefix = "montecarlo"
    else:
        ms = sample_moments(measure, cfg.n, noise, realization=0)
        estimate = condensed.estimate_condensed(ms, est_cfg, spec, mode="single")
        prefix = "zeros" if kind == "zero" else "poles"
    out = cfg.out_dir()
    paths = []
    for name, grid in (
        (f"{prefix}_grid_normalized.csv", estimate.normalized),
        (f"{prefix}_grid_raw.csv", estimate.raw),
    ):
        path = out / name
        condensed.write_grid_csv(grid, path)
        paths.append(path)
    pgm_path = out / f"{prefix}_heatmap.pgm"
    condensed.write_grid_pgm(estimate.normalized, pgm_path)
    paths.append(pgm_path)
    modes = condensed.extract_modes(
        estimate.normalized,
        count=est_cfg.order,
        min_separation=2.0 * spec.cell_width,
    )
    modes_path = out / f"{prefix}_modes.csv"
    _write_table(
        modes_path,
        ["rank", "re", "im"],
        [(i + 1, f"{z.real:.17g}", f"{z.imag:.17g}") for i, z in enumerate(modes)],
    )
    paths.append(modes_path)
    return paths


def cmd_compare(cfg: RunConfig, dump_path) -> Path:
    """Score a saved expansion dump against freshly regenerated samples."""
    src = Path(dump_path)
    if not src.exists():
        raise ConfigError(f"expansion dump not found: {src}")
    dump = laguerre.read_expansion_csv(src)
    samples = _diagonal_sample_matrix(cfg)
    rows = []
    for k, expansion in dump:
        if not 1 <= k <= samples.shape[1]:
            raise ConfigError(
                f"dump row k={k} outside the configured pencil order {samples.shape[1]}"
            )
        column = samples[:, k - 1]
        l2_one = laguerre.histogram_l2(expansion, column, order=0)
        l2_full = laguerre.histogram_l2(expansion, column)
        rows.append((k, f"{l2_one:.17g}", f"{l2_full:.17g}"))
    out = cfg.out_dir() / "comparison.csv"
    _write_table(out, ["k", "l2_one_term", "l2_full_series"], rows)
    return out


def _write_table(path, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(str(v) for v in row) + "\n")


# ---------------------------------------------------------------------------
# argument parsing


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=str, default=None, help="key = value config file")
    parser.add_argument("--measure", type=str, default=None, help="measure description file")
    parser.add_argument("--seed", type=int, default=None, help="noise seed")
    parser.add_argument("--sigma", type=float, default=None, help="noise standard deviation")
    parser.add_argument("--n", type=int, default=None, help="number of moments")
    parser.add_argument("--realizations", type=int, default=None, help="Monte Carlo sample count")
    parser.add_argument("--grid-size", dest="grid_size", type=int, default=None,
                        help="lattice nodes per axis")
    parser.add_argument("--beta-smooth", dest="beta_smooth", type=float, default=None,
                        help="smoothing parameter (default 5n)")
    parser.add_argument("--order", type=int, default=None, help="pencil order")
    parser.add_argument("--laguerre-order", dest="laguerre_order", type=int, default=None,
                        help="series truncation order")
    parser.add_argument("--kind", type=str, default=None, choices=("pole", "zero"),
                        help="pencil kind for fit/montecarlo commands")
    parser.add_argument("--out", type=str, default=None, help="output directory")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="condensity",
        description="Condensed-density pipeline for zeros/poles of Cauchy transforms.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in (
        ("simulate", "write noiseless and noisy moment-sequence files"),
        ("transform", "apply the reciprocal transform to a moment file"),
        ("fit-density", "fit per-diagonal Laguerre expansions at the probe point"),
        ("estimate-zeros", "single-realization condensed density of the zeros"),
        ("estimate-poles", "single-realization condensed density of the poles"),
        ("montecarlo", "Monte Carlo condensed density over many realizations"),
        ("compare", "score a saved expansion dump against fresh samples"),
    ):
        p = sub.add_parser(name, help=helptext)
        _add_common_flags(p)
        if name == "transform":
            p.add_argument("input", type=str, help="moment CSV to transform")
        if name == "compare":
            p.add_argument("--dump", type=str, default=None,
                           help="expansion dump (default: <out>/expansions.csv)")
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = build_config(args)
        if args.command == "simulate":
            cmd_simulate(cfg)
        elif args.command == "transform":
            cmd_transform(cfg, args.input)
        elif args.command == "fit-density":
            cmd_fit_density(cfg)
        elif args.command == "estimate-zeros":
            cmd_estimate(cfg, kind="zero", mode="single")
        elif args.command == "estimate-poles":
            cmd_estimate(cfg, kind="pole", mode="single")
        elif args.command == "montecarlo":
            cmd_estimate(cfg, kind=cfg.kind, mode="montecarlo")
        elif args.command == "compare":
            dump = args.dump if args.dump is not None else cfg.out_dir() / "expansions.csv"
            cmd_compare(cfg, dump)
        else:  # pragma: no cover - argparse enforces the choices
            raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _NUMERIC_ERRORS as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def console_main() -> None:  # pragma: no cover - thin wrapper
    sys.exit(main())
