"""
Run settings, uses pydantic settings models.
"""

from pathlib import Path
from typing import Literal

from pydantic_settings import (
    BaseSettings,
    JsonConfigSettingsSource,
    PydanticBaseSettingsSource,
    SettingsConfigDict,
)

from epsicomp.service.estimation import DEFAULT_FIT_INTERVAL, DEFAULT_FRACTIONS

DEFAULT_FAMILY = ("linear", "spline", "poly2", "poly5", "nearest")


class Settings(BaseSettings):
    """
    Defaults for every command-line workflow. Values can be set, in
    increasing priority, in ``~/.epsicomp.conf``, ``epsicomp.json``,
    ``EPSICOMP_*`` environment variables, and command-line flags.
    """

    threads: int = 1
    "Worker threads. Results never depend on this."
    seed: int = 0
    "Master seed for selection schemes and permutation nulls."
    schemes: int = 10
    "Selection schemes averaged per retained fraction."
    fractions: tuple[float, ...] = DEFAULT_FRACTIONS
    "Retained fractions swept by the estimator."
    fit_interval: tuple[float, float] = DEFAULT_FIT_INTERVAL
    "Interval of retained fractions used by the log-log fit."
    family: tuple[str, ...] = DEFAULT_FAMILY
    "Approximation methods, by token (linear, spline, nearest, polyN)."
    norm: str = "uniform"
    "Error norm: uniform, or power:q for the mean-power norm."
    diff_orders: int = 0
    "Highest difference order for coefficient profiles."
    selection: Literal["stratified", "uniform"] = "stratified"
    "Selection scheme used to choose retained samples."
    out: Path = Path("epsicomp-out")
    "Output directory for artifacts."
    verbose: bool = False

    model_config = SettingsConfigDict(
        json_file=("~/.epsicomp.conf", "epsicomp.json"), env_prefix="epsicomp_"
    )

    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls: BaseSettings,
        init_settings: PydanticBaseSettingsSource,
        env_settings: PydanticBaseSettingsSource,
        dotenv_settings: PydanticBaseSettingsSource,
        file_secret_settings: PydanticBaseSettingsSource,
    ) -> tuple[PydanticBaseSettingsSource, ...]:
        return (
            init_settings,
            env_settings,
            dotenv_settings,
            JsonConfigSettingsSource(settings_cls),
            file_secret_settings,
        )
