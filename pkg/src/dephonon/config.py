"""Run configuration: one JSON document driving the whole pipeline.

Every physics parameter is explicit; missing fields fall back to the built-in
preset (N=2022 bulk sites, m=1, M=2, k=K=1, k_I=0.1).  The resolved values
are echoed into the run manifest so outputs never depend on hidden defaults.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path

from .coupling import CouplingParams
from .lattice import ChainConfig


@dataclass(frozen=True)
class SdfConfig:
    """Sampling parameters of the numerical spectral density."""

    sigma: float | None = None  # None -> 1e-2 * omega_max
    n_grid: int = 2048

    def __post_init__(self) -> None:
        if self.sigma is not None and self.sigma <= 0:
            raise ValueError("sigma must be positive when given")
        if self.n_grid < 64:
            raise ValueError("n_grid must be at least 64")


@dataclass(frozen=True)
class DynamicsConfig:
    """Time grid and temperatures for rate profiles and evolution."""

    temperatures: tuple[float, ...] = (0.0, 2.0)
    horizon_factor: float = 10.0       # horizon = horizon_factor / Gamma
    samples_per_period: int = 100      # of the 2 pi / omega_loc oscillation
    initial_amplitudes: tuple[float, ...] = (0.5, 0.5, 0.5, 0.5)

    def __post_init__(self) -> None:
        if len(self.temperatures) == 0:
            raise ValueError("temperatures must be non-empty")
        if any(t < 0 for t in self.temperatures):
            raise ValueError("temperatures must be non-negative")
        if self.horizon_factor <= 0:
            raise ValueError("horizon_factor must be positive")
        if self.samples_per_period < 40:
            raise ValueError("samples_per_period must be at least 40")
        if len(self.initial_amplitudes) != 4:
            raise ValueError("initial_amplitudes must have 4 entries")


@dataclass(frozen=True)
class NonmarkovConfig:
    """Sweep grids for the non-Markovianity stages.

    ``dipolar_strength`` sets the coupling used in the sweeps; the default is
    strong enough that the accumulated exposure is of order one, the regime
    where coherence backflow is visibly suppressed by temperature.
    ``temperature_factors`` are in units of omega_max.
    """

    horizon_factor: float = 20.0
    k_interface_sweep: tuple[float, ...] = (
        0.0, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0,
    )
    temperature_factors: tuple[float, ...] = (0.0, 0.5, 1.0, 1.5, 2.0)
    dipolar_strength: float = 1.0

    def __post_init__(self) -> None:
        if self.horizon_factor <= 0:
            raise ValueError("horizon_factor must be positive")
        if len(self.k_interface_sweep) == 0 or len(self.temperature_factors) == 0:
            raise ValueError("sweep lists must be non-empty")
        if any(k < 0 for k in self.k_interface_sweep):
            raise ValueError("k_interface values must be non-negative")
        if any(t < 0 for t in self.temperature_factors):
            raise ValueError("temperature factors must be non-negative")
        if self.dipolar_strength <= 0:
            raise ValueError("dipolar_strength must be positive")


@dataclass(frozen=True)
class ControlConfig:
    """Closed-system control run: field, mode, window, initial state."""

    mode: str = "LOCAL"
    field: tuple[float, ...] = (1.0, 0.0, 0.0)
    t_final: float = 30.0
    n_samples: int = 600
    initial_amplitudes: tuple[float, ...] = (1.0, 0.0, 0.0, 0.0)

    def __post_init__(self) -> None:
        if self.mode not in ("LOCAL", "GLOBAL"):
            raise ValueError(f"mode must be LOCAL or GLOBAL, got {self.mode!r}")
        if len(self.field) != 3:
            raise ValueError("field must be a 3-vector")
        if self.t_final <= 0:
            raise ValueError("t_final must be positive")
        if self.n_samples < 2:
            raise ValueError("n_samples must be at least 2")
        if len(self.initial_amplitudes) != 4:
            raise ValueError("initial_amplitudes must have 4 entries")


@dataclass(frozen=True)
class OutputConfig:
    directory: str = "out"
    precision: int = 17
    dos_bins: int = 100

    def __post_init__(self) -> None:
        if not (1 <= self.precision <= 17):
            raise ValueError("precision must be between 1 and 17")
        if self.dos_bins < 2:
            raise ValueError("dos_bins must be at least 2")


@dataclass(frozen=True)
class RunConfig:
    chain: ChainConfig = field(default_factory=ChainConfig)
    coupling: CouplingParams = field(default_factory=CouplingParams)
    sdf: SdfConfig = field(default_factory=SdfConfig)
    dynamics: DynamicsConfig = field(default_factory=DynamicsConfig)
    nonmarkov: NonmarkovConfig = field(default_factory=NonmarkovConfig)
    control: ControlConfig = field(default_factory=ControlConfig)
    output: OutputConfig = field(default_factory=OutputConfig)


_SECTIONS = {
    "chain": ChainConfig,
    "coupling": CouplingParams,
    "sdf": SdfConfig,
    "dynamics": DynamicsConfig,
    "nonmarkov": NonmarkovConfig,
    "control": ControlConfig,
    "output": OutputConfig,
}


def _build_section(cls, data: dict):
    allowed = {f.name for f in dataclasses.fields(cls)}
    unknown = set(data) - allowed
    if unknown:
        raise ValueError(f"unknown keys in {cls.__name__}: {sorted(unknown)}")
    coerced = {
        k: tuple(v) if isinstance(v, list) else v for k, v in data.items()
    }
    return cls(**coerced)


def config_from_dict(data: dict) -> RunConfig:
    """Build a RunConfig from a nested plain dict (e.g. parsed JSON)."""
    unknown = set(data) - set(_SECTIONS)
    if unknown:
        raise ValueError(f"unknown config sections: {sorted(unknown)}")
    kwargs = {
        name: _build_section(cls, data[name])
        for name, cls in _SECTIONS.items()
        if name in data
    }
    return RunConfig(**kwargs)


def load_config(path: str | Path) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ValueError("config file must contain a JSON object")
    return config_from_dict(data)


def config_to_dict(config: RunConfig) -> dict:
    """Fully resolved configuration as a JSON-serializable dict."""
    raw = dataclasses.asdict(config)

    def clean(obj):
        if isinstance(obj, dict):
            return {k: clean(v) for k, v in obj.items()}
        if isinstance(obj, (list, tuple)):
            return [clean(v) for v in obj]
        if hasattr(obj, "value"):  # enums
            return obj.value
        return obj

    return clean(raw)
