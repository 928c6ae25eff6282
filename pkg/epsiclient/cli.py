"""
A CLI interface to epsicomp.
"""

import sys
from contextlib import contextmanager
from pathlib import Path
from typing import Annotated, Optional

import rich
import rich.console
import typer
from loguru import logger
from pydantic import ValidationError

from epsicomp.errors import DataError, NumericFailure
from epsicomp.service import (
    approximation,
    class_complexity,
    estimation,
    generators,
    individual,
    segmentation,
)
from epsicomp.service.versioning import RunManifest
from epsicomp.settings import Settings
from epsicomp.storage import Storage, format_series
from epsimeta.modulus import HolderModulus, TabulatedModulus

from . import helper

SETTINGS: Settings
CONSOLE = rich.console.Console()
ERROR_CONSOLE = rich.console.Console(stderr=True)

APP = typer.Typer(
    help=(
        "epsilon-complexity of functions: class bounds, "
        "coefficient estimation and segmentation."
    )
)

# Generator flags shared by gen and converge
Kind = Annotated[
    str,
    typer.Option(
        "--kind", help="affine, polynomial, sine, weierstrass, fbm or logistic."
    ),
]
NPoints = Annotated[Optional[int], typer.Option("--n", help="Number of samples.")]
ParamA = Annotated[
    Optional[float], typer.Option("--a", help="Affine slope, or Weierstrass amplitude ratio.")
]
ParamB = Annotated[
    Optional[float], typer.Option("--b", help="Affine offset, or Weierstrass frequency ratio.")
]
Terms = Annotated[Optional[int], typer.Option("--terms", help="Weierstrass terms.")]
Coeffs = Annotated[
    Optional[str],
    typer.Option("--coeffs", help="Polynomial coefficients, ascending powers, comma separated."),
]
Freq = Annotated[Optional[float], typer.Option("--freq", help="Sine frequency.")]
Phase = Annotated[Optional[float], typer.Option("--phase", help="Sine phase.")]
Hurst = Annotated[Optional[float], typer.Option("--hurst", help="fBm Hurst exponent.")]
ParamR = Annotated[Optional[float], typer.Option("--r", help="Logistic map parameter.")]
X0 = Annotated[Optional[float], typer.Option("--x0", help="Logistic map start value.")]

# Sweep flags shared by estimate and segment
Seed = Annotated[Optional[int], typer.Option("--seed", help="Master seed.")]
Schemes = Annotated[
    Optional[int], typer.Option("--schemes", help="Selection schemes per fraction.")
]
Fractions = Annotated[
    Optional[str], typer.Option("--fractions", help="Retained fractions, comma separated.")
]
FitInterval = Annotated[
    Optional[str], typer.Option("--fit-interval", help="Fit interval as 'alpha,beta'.")
]
Family = Annotated[
    Optional[str],
    typer.Option("--family", help="Approximation methods: linear, spline, nearest, polyN."),
]
Norm = Annotated[
    Optional[str], typer.Option("--norm", help="Error norm: uniform, or power:q.")
]
Selection = Annotated[
    Optional[str], typer.Option("--selection", help="stratified or uniform.")
]
Nested = Annotated[
    bool, typer.Option("--nested", help="Use nested selections across fractions.")
]
Out = Annotated[Optional[Path], typer.Option("--out", help="Output directory.")]
Threads = Annotated[
    Optional[int], typer.Option("--threads", help="Worker threads (EPSICOMP_THREADS).")
]


@contextmanager
def handle_errors():
    """
    Map library failures onto exit statuses: 2 for invalid arguments, 3 for
    data errors, 4 for numeric failures.
    """

    try:
        yield
    except (generators.InvalidSpec, ValidationError) as e:
        ERROR_CONSOLE.print("Invalid arguments:", str(e), style="red", markup=False)
        raise typer.Exit(code=2)
    except (DataError, OSError) as e:
        ERROR_CONSOLE.print(f"{type(e).__name__}:", str(e), style="red", markup=False)
        raise typer.Exit(code=DataError.exit_code)
    except NumericFailure as e:
        ERROR_CONSOLE.print(f"{type(e).__name__}:", str(e), style="red", markup=False)
        raise typer.Exit(code=NumericFailure.exit_code)


def _floats(text: str, flag: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise typer.BadParameter(
            f"expected comma separated numbers, got {text!r}", param_hint=flag
        )


def _ints(text: str, flag: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise typer.BadParameter(
            f"expected comma separated integers, got {text!r}", param_hint=flag
        )


def _threads(threads: int | None) -> int:
    return threads if threads is not None else SETTINGS.threads


def _family_and_norm(family: str | None, norm: str | None):
    try:
        methods = approximation.parse_family(
            family if family is not None else list(SETTINGS.family)
        )
        error_norm = approximation.parse_norm(norm if norm is not None else SETTINGS.norm)
    except ValueError as e:
        raise typer.BadParameter(str(e))

    if len(methods) == 0:
        raise typer.BadParameter("at least one method is needed", param_hint="--family")

    return methods, error_norm


def _sweep_config(
    seed: int | None,
    schemes: int | None,
    fractions: str | None,
    fit_interval: str | None,
    family: str | None,
    norm: str | None,
    selection: str | None,
    nested: bool,
    diff_orders: int | None = None,
) -> estimation.SweepConfig:
    methods, error_norm = _family_and_norm(family, norm)

    interval = (
        _floats(fit_interval, "--fit-interval")
        if fit_interval is not None
        else SETTINGS.fit_interval
    )

    if len(interval) != 2:
        raise typer.BadParameter("expected 'alpha,beta'", param_hint="--fit-interval")

    return estimation.SweepConfig(
        fractions=(
            _floats(fractions, "--fractions") if fractions is not None else SETTINGS.fractions
        ),
        fit_interval=interval,
        schemes_per_fraction=schemes if schemes is not None else SETTINGS.schemes,
        rng_seed=seed if seed is not None else SETTINGS.seed,
        family=methods,
        norm=error_norm,
        difference_orders=diff_orders if diff_orders is not None else SETTINGS.diff_orders,
        selection=selection if selection is not None else SETTINGS.selection,
        nested=nested,
    )


def _generator_spec(kind: str, n_points: int | None, **parameters):
    if parameters.get("coeffs") is not None:
        parameters["coeffs"] = _floats(parameters["coeffs"], "--coeffs")

    return generators.build_spec(kind, n_points=n_points, **parameters)


@APP.callback()
def configure(
    verbose: Annotated[
        Optional[bool], typer.Option("--verbose/--quiet", help="Debug logging on stderr.")
    ] = None,
):
    """
    Settings are read from ~/.epsicomp.conf, ./epsicomp.json and EPSICOMP_*
    environment variables; flags take precedence.
    """
    global SETTINGS

    SETTINGS = Settings()

    logger.remove()
    logger.add(
        sys.stderr,
        level="DEBUG" if (verbose if verbose is not None else SETTINGS.verbose) else "WARNING",
    )


@APP.command("class")
def cmd_class(
    holder_L: Annotated[float, typer.Option("--holder-L", help="Holder constant L.")] = 1.0,
    holder_p: Annotated[float, typer.Option("--holder-p", help="Holder exponent p.")] = 1.0,
    knots: Annotated[
        Optional[str],
        typer.Option("--knots", help="Tabulated modulus instead, as 'h:w,h:w,...'."),
    ] = None,
    radius: Annotated[float, typer.Option("--radius", help="Class radius R.")] = 1.0,
    dim: Annotated[int, typer.Option("--dim", help="Dimension k.")] = 1,
    eps_list: Annotated[
        str, typer.Option("--eps-list", help="Error levels, comma separated.")
    ] = "0.1",
    oracle: Annotated[
        bool, typer.Option("--oracle", help="Cross-check with the brute-force oracle.")
    ] = False,
    resolution: Annotated[
        Optional[int], typer.Option("--resolution", help="Oracle lattice points per axis.")
    ] = None,
    out: Out = None,
    threads: Threads = None,
):
    """
    Exact epsilon-complexity of a modulus-of-continuity class, and the
    affine coefficients of Holder classes.
    """
    global CONSOLE

    epsilons = _floats(eps_list, "--eps-list")

    if len(epsilons) == 0:
        raise typer.BadParameter(
            "at least one error level is needed", param_hint="--eps-list"
        )

    if any(x <= 0.0 for x in epsilons):
        raise typer.BadParameter("error levels must be positive", param_hint="--eps-list")

    with handle_errors():
        if knots is not None:
            pairs = [x.split(":") for x in knots.split(",") if x.strip()]

            try:
                table = tuple((float(h), float(w)) for h, w in pairs)
            except ValueError:
                raise typer.BadParameter(f"cannot parse {knots!r}", param_hint="--knots")

            modulus = TabulatedModulus(knots=table)
        else:
            modulus = HolderModulus(L=holder_L, p=holder_p)

        spec = class_complexity.ClassSpec(modulus=modulus, radius=radius, dim=dim)

        resolution = (
            resolution if resolution is not None else class_complexity.default_resolution(dim)
        )

        report = class_complexity.class_report(
            spec,
            list(epsilons),
            oracle_resolution=resolution if oracle else None,
            threads=_threads(threads),
        )

        CONSOLE.print(helper.render_class_rows(report.rows, oracle))

        if report.coefficients is not None:
            CONSOLE.print(
                f"S_cl(eps) = A + B ln(eps) with A = {helper.number(report.coefficients.A)}, "
                f"B = {helper.number(report.coefficients.B)}"
            )

        storage = Storage(out=out if out is not None else SETTINGS.out)
        storage.write_json("class.json", report)
        storage.write_json(
            "manifest.json",
            RunManifest(
                command="class",
                config={
                    **spec.model_dump(mode="json"),
                    "eps_list": list(epsilons),
                    "oracle_resolution": resolution if oracle else None,
                    "threads": _threads(threads),
                },
                seeds={},
            ),
        )


@APP.command("estimate")
def cmd_estimate(
    input: Annotated[str, typer.Argument(help="CSV series, or - for standard input.")],
    seed: Seed = None,
    schemes: Schemes = None,
    fractions: Fractions = None,
    fit_interval: FitInterval = None,
    family: Family = None,
    norm: Norm = None,
    diff_orders: Annotated[
        Optional[int], typer.Option("--diff-orders", help="Highest difference order.")
    ] = None,
    selection: Selection = None,
    nested: Nested = False,
    out: Out = None,
    threads: Threads = None,
):
    """
    Estimate the complexity coefficients (A, B) of a series. Writes
    curve.csv, coefficients.json and manifest.json, and profile.json
    when difference orders are requested.
    """
    global CONSOLE

    with handle_errors():
        config = _sweep_config(
            seed, schemes, fractions, fit_interval, family, norm, selection, nested, diff_orders
        )
        storage = Storage(out=out if out is not None else SETTINGS.out)
        series, input_digest = storage.read(input)

        curve, coefficients = estimation.estimate(series, config, threads=_threads(threads))

        storage.write_csv(
            "curve.csv",
            ["fraction", "mean_error", "stddev", "n_schemes"],
            [[x.fraction, x.mean_error, x.stddev, x.n_schemes] for x in curve.rows],
        )
        storage.write_json("coefficients.json", coefficients)

        CONSOLE.print(helper.render_curve(curve))
        CONSOLE.print(helper.render_coefficients(coefficients))

        if config.difference_orders > 0:
            profile = estimation.CoefficientProfile(
                entries=estimation.coefficient_profile(
                    series, config, threads=_threads(threads)
                )
            )
            storage.write_json("profile.json", profile)
            CONSOLE.print(helper.render_profile(profile.entries))

        storage.write_json(
            "manifest.json",
            RunManifest(
                command="estimate",
                config={**config.model_dump(mode="json"), "threads": _threads(threads)},
                seeds={"rng_seed": config.rng_seed},
                input_digest=input_digest,
            ),
        )


@APP.command("gen")
def cmd_gen(
    kind: Kind,
    n_points: NPoints = None,
    a: ParamA = None,
    b: ParamB = None,
    terms: Terms = None,
    coeffs: Coeffs = None,
    freq: Freq = None,
    phase: Phase = None,
    hurst: Hurst = None,
    seed: Seed = None,
    r: ParamR = None,
    x0: X0 = None,
    output: Annotated[
        Optional[Path],
        typer.Option("--output", "-o", help="Output CSV; standard output by default."),
    ] = None,
):
    """
    Sample a synthetic test function, one value per line, without
    normalization.
    """

    with handle_errors():
        spec = _generator_spec(
            kind,
            n_points,
            a=a,
            b=b,
            terms=terms,
            coeffs=coeffs,
            freq=freq,
            phase=phase,
            hurst=hurst,
            seed=seed,
            r=r,
            x0=x0,
        )

        text = format_series(generators.generate(spec).values)

        if output is None:
            sys.stdout.write(text)
            return

        output.write_text(text)

        manifest = RunManifest(
            command="gen",
            config=spec.model_dump(mode="json"),
            seeds={"seed": spec.seed} if hasattr(spec, "seed") else {},
        )
        output.with_suffix(".manifest.json").write_text(
            manifest.model_dump_json(indent=2) + "\n"
        )

        logger.info("Wrote {} samples of {} to {}", spec.n_points, spec.kind, output)


@APP.command("segment")
def cmd_segment(
    input: Annotated[str, typer.Argument(help="CSV series, or - for standard input.")],
    window: Annotated[int, typer.Option("--window", help="Window length W.")] = 1000,
    hop: Annotated[int, typer.Option("--hop", help="Samples between window starts.")] = 250,
    threshold: Annotated[
        float, typer.Option("--threshold", help="Multiplier of the permutation threshold.")
    ] = 1.0,
    min_separation: Annotated[
        Optional[int],
        typer.Option("--min-separation", help="Minimum change-point spacing, W by default."),
    ] = None,
    min_effect: Annotated[
        float, typer.Option("--min-effect", help="Minimum median shift in robust units.")
    ] = 5.0,
    seed: Seed = None,
    schemes: Schemes = None,
    fractions: Fractions = None,
    fit_interval: FitInterval = None,
    family: Family = None,
    norm: Norm = None,
    selection: Selection = None,
    nested: Nested = False,
    out: Out = None,
    threads: Threads = None,
):
    """
    Sliding-window coefficients and their change points. Writes tracks.csv,
    change_points.json and manifest.json.
    """
    global CONSOLE

    with handle_errors():
        config = segmentation.WindowConfig(
            window_length=window,
            hop=hop,
            sweep=_sweep_config(
                seed, schemes, fractions, fit_interval, family, norm, selection, nested
            ),
        )
        storage = Storage(out=out if out is not None else SETTINGS.out)
        series, input_digest = storage.read(input)

        storage.write_json(
            "manifest.json",
            RunManifest(
                command="segment",
                config={
                    **config.model_dump(mode="json"),
                    "threshold_multiplier": threshold,
                    "min_separation": min_separation,
                    "min_effect": min_effect,
                    "threads": _threads(threads),
                },
                seeds={"rng_seed": config.sweep.rng_seed},
                input_digest=input_digest,
            ),
        )

        tracks = segmentation.coefficient_track(series, config, threads=_threads(threads))

        storage.write_csv(
            "tracks.csv",
            ["start", "A", "B", "r_squared", "degenerate"],
            [[x.start, x.A, x.B, x.r_squared, x.degenerate] for x in tracks.rows],
        )

        result = segmentation.detect_changes(
            tracks,
            min_separation=min_separation,
            threshold_multiplier=threshold,
            seed=config.sweep.rng_seed,
            min_effect=min_effect,
        )

        storage.write_json(
            "change_points.json",
            result,
            exclude={"tracks": {"rows"}},
        )

        CONSOLE.print(helper.render_segmentation(result))
        CONSOLE.print(
            "Change points: " + (", ".join(str(x) for x in result.change_points) or "none")
        )


@APP.command("converge")
def cmd_converge(
    kind: Kind,
    eps: Annotated[float, typer.Option("--eps", help="Error level.")] = 0.05,
    n_list: Annotated[
        str, typer.Option("--n-list", help="Increasing sample sizes, comma separated.")
    ] = "51,201,801,3201",
    a: ParamA = None,
    b: ParamB = None,
    terms: Terms = None,
    coeffs: Coeffs = None,
    freq: Freq = None,
    phase: Phase = None,
    hurst: Hurst = None,
    seed: Seed = None,
    r: ParamR = None,
    x0: X0 = None,
    family: Family = None,
    norm: Norm = None,
    out: Out = None,
    threads: Threads = None,
):
    """
    Discrete complexity S_N(eps) of one function sampled at increasing N,
    against its value at the largest N. Writes converge.csv.
    """
    global CONSOLE

    sizes = _ints(n_list, "--n-list")

    if eps < 0.0:
        raise typer.BadParameter("the error level must be nonnegative", param_hint="--eps")

    with handle_errors():
        methods, error_norm = _family_and_norm(family, norm)

        spec = _generator_spec(
            kind,
            None,
            a=a,
            b=b,
            terms=terms,
            coeffs=coeffs,
            freq=freq,
            phase=phase,
            hurst=hurst,
            seed=seed,
            r=r,
            x0=x0,
        )

        try:
            rows = individual.convergence_check(
                spec, eps, sizes, methods, error_norm, threads=_threads(threads)
            )
        except ValueError as e:
            raise typer.BadParameter(str(e), param_hint="--n-list")

        storage = Storage(out=out if out is not None else SETTINGS.out)
        storage.write_csv(
            "converge.csv",
            ["n_points", "s_n", "gap"],
            [[x.n_points, x.s_n, x.gap] for x in rows],
        )
        storage.write_json(
            "manifest.json",
            RunManifest(
                command="converge",
                config={
                    "generator": spec.model_dump(mode="json"),
                    "eps": eps,
                    "n_list": sizes,
                    "family": [x.model_dump(mode="json") for x in methods],
                    "norm": error_norm.model_dump(mode="json"),
                    "threads": _threads(threads),
                },
                seeds={"seed": spec.seed} if hasattr(spec, "seed") else {},
            ),
        )

        CONSOLE.print(helper.render_convergence(rows))


def main():
    global APP

    APP()
