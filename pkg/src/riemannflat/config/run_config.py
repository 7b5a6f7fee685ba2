"""
Run Configuration
Dataclass configuration for a single toolkit run, loaded from YAML and CLI flags
"""

import logging
import os
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

import yaml

from riemannflat.core.intermittency import Axis, Quantity
from riemannflat.core.norms import DEFAULT_GRID_SIZE, DEFAULT_TAIL_TOLERANCE, P_MAX, P_MIN
from riemannflat.core.result_writer import OutputFormat, default_output_name
from riemannflat.core.series_core import SeriesKind, SeriesSpec
from riemannflat.utils.precision import is_power_of_two

logger = logging.getLogger(__name__)

OUTPUT_DIR_ENV = "RIEMANNFLAT_OUTPUT_DIR"
DEFAULT_K_MAX = 1 << 20
DEFAULT_SAMPLES = 4096


class ConfigError(ValueError):
    """The run configuration is malformed or incomplete"""


class Command(str, Enum):
    EVAL = "eval"
    FILTER_NORMS = "filter-norms"
    STRUCTURE = "structure"
    FLATNESS = "flatness"
    ZALCWASSER = "zalcwasser"
    FIT = "fit"
    SPECTRUM = "spectrum"
    TRAJECTORY = "trajectory"
    BLOCKS = "blocks"


# Commands that read the scale list
_SCALED_COMMANDS = {
    Command.FILTER_NORMS,
    Command.STRUCTURE,
    Command.FLATNESS,
    Command.ZALCWASSER,
    Command.FIT,
}


@dataclass(frozen=True)
class FitOptions:
    """Fit window and log-correction settings"""
    window: Optional[Tuple[float, float]] = None
    log_margin: float = 0.2
    exponent: Optional[float] = None

    def __post_init__(self):
        if self.window is not None:
            if len(self.window) != 2 or not 0 < min(self.window):
                raise ConfigError(f"Fit window must be two positive scales, got {self.window!r}")
            object.__setattr__(self, "window", (float(self.window[0]), float(self.window[1])))
        if not 0 <= self.log_margin <= 1:
            raise ConfigError(f"Log-correction margin must lie in [0, 1], got {self.log_margin}")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "window": list(self.window) if self.window else None,
            "log_margin": self.log_margin,
            "exponent": self.exponent,
        }


@dataclass(frozen=True)
class OutputSpec:
    """Where and how the envelope is written"""
    path: Optional[str] = None
    format: OutputFormat = OutputFormat.CSV

    def __post_init__(self):
        try:
            object.__setattr__(self, "format", OutputFormat(self.format))
        except ValueError:
            raise ConfigError(f"Unknown output format: {self.format!r}") from None

    def to_dict(self) -> Dict[str, Any]:
        return {"path": self.path, "format": self.format.value}


@dataclass(frozen=True)
class RunConfig:
    """Everything one command needs; frozen after validation"""
    command: Command
    series: SeriesSpec = field(default_factory=lambda: SeriesSpec(SeriesKind.RIEMANN, DEFAULT_K_MAX))
    axis: Optional[Axis] = None
    scales: Tuple[float, ...] = ()
    grid_size: int = DEFAULT_GRID_SIZE
    ps: Tuple[float, ...] = ()
    quantity: Optional[Quantity] = None
    alphas: Tuple[float, ...] = ()
    samples: int = DEFAULT_SAMPLES
    lp_base: float = 2.0
    tail_tolerance: float = DEFAULT_TAIL_TOLERANCE
    threads: Optional[int] = None
    fit: FitOptions = field(default_factory=FitOptions)
    output: OutputSpec = field(default_factory=OutputSpec)

    def __post_init__(self):
        """Validate run configuration"""
        try:
            object.__setattr__(self, "command", Command(self.command))
            if self.axis is not None:
                object.__setattr__(self, "axis", Axis(self.axis))
            if self.quantity is not None:
                object.__setattr__(self, "quantity", Quantity(self.quantity))
        except ValueError as e:
            raise ConfigError(str(e)) from None

        object.__setattr__(self, "scales", tuple(float(s) for s in self.scales))
        object.__setattr__(self, "ps", tuple(float(p) for p in self.ps))
        object.__setattr__(self, "alphas", tuple(float(a) for a in self.alphas))

        if not is_power_of_two(self.grid_size) or self.grid_size < 2:
            raise ConfigError(f"Grid size must be a power of two >= 2, got {self.grid_size}")
        if self.threads is not None and self.threads < 1:
            raise ConfigError(f"Thread count must be >= 1, got {self.threads}")
        if self.samples < 0:
            raise ConfigError(f"Sample count must be >= 0, got {self.samples}")
        if not self.lp_base > 1:
            raise ConfigError(f"Littlewood-Paley base must be > 1, got {self.lp_base}")
        if not 0 < self.tail_tolerance < 1:
            raise ConfigError(f"Tail tolerance must lie in (0, 1), got {self.tail_tolerance}")
        for p in self.ps:
            if not P_MIN <= p <= P_MAX:
                raise ConfigError(f"Exponent p must lie in [{P_MIN:g}, {P_MAX:g}], got {p}")

        if self.command in _SCALED_COMMANDS and not self.scales:
            raise ConfigError(f"Command {self.command.value} needs a nonempty scale range")
        if self.command is Command.SPECTRUM and not self.alphas:
            raise ConfigError("Command spectrum needs a nonempty alpha range")
        if self.command is Command.FIT and self.quantity is None:
            raise ConfigError("Command fit needs a quantity")
        if self.command is Command.ZALCWASSER and not self.ps:
            raise ConfigError("Command zalcwasser needs at least one exponent p")
        if self.command is Command.FLATNESS and self.axis is None:
            raise ConfigError("Command flatness needs an axis (N or l)")

        axis = self.scale_axis
        for s in self.scales:
            if axis is Axis.INCREMENT_SCALE and not 0 < s < 1:
                raise ConfigError(f"Increment scales l must lie in (0, 1), got {s:g}")
            if axis is Axis.FILTER_CUTOFF and not (s >= 1 and float(s).is_integer()):
                raise ConfigError(f"Cutoffs N must be positive integers, got {s:g}")

    @property
    def effective_axis(self) -> Optional[Axis]:
        if self.quantity is not None:
            return self.quantity.axis
        return self.axis

    @property
    def scale_axis(self) -> Optional[Axis]:
        """Axis the scale list lives on, None for commands that ignore it"""
        if self.command is Command.STRUCTURE:
            return Axis.INCREMENT_SCALE
        if self.command in (Command.FILTER_NORMS, Command.ZALCWASSER):
            return Axis.FILTER_CUTOFF
        if self.command in (Command.FLATNESS, Command.FIT):
            return self.effective_axis
        return None

    def output_target(self) -> str:
        """Output path, falling back to $RIEMANNFLAT_OUTPUT_DIR/<command>.<format>"""
        if self.output.path:
            return self.output.path
        name = default_output_name(self.command.value, self.output.format)
        directory = os.environ.get(OUTPUT_DIR_ENV)
        if directory:
            return str(Path(directory) / name)
        return "-"

    def to_dict(self) -> Dict[str, Any]:
        """Config echo written into every envelope"""
        return {
            "command": self.command.value,
            "series": self.series.to_dict(),
            "axis": self.axis.value if self.axis else None,
            "scales": list(self.scales),
            "grid_size": self.grid_size,
            "ps": list(self.ps),
            "quantity": self.quantity.value if self.quantity else None,
            "alphas": list(self.alphas),
            "samples": self.samples,
            "lp_base": self.lp_base,
            "tail_tolerance": self.tail_tolerance,
            "threads": self.threads,
            "fit": self.fit.to_dict(),
            "output": self.output.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunConfig":
        """Build a config from plain data (YAML or merged CLI flags)"""
        data = dict(data)
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"Unknown configuration keys: {sorted(unknown)}")
        if "command" not in data:
            raise ConfigError("Configuration needs a command")

        try:
            series = data.get("series") or {}
            if not isinstance(series, SeriesSpec):
                data["series"] = SeriesSpec(
                    kind=series.get("kind", SeriesKind.RIEMANN.value),
                    truncation=series.get("truncation", DEFAULT_K_MAX),
                    shift=series.get("shift"),
                )
            fit = data.get("fit") or {}
            if not isinstance(fit, FitOptions):
                window = fit.get("window")
                data["fit"] = FitOptions(
                    window=tuple(window) if window else None,
                    log_margin=fit.get("log_margin", 0.2),
                    exponent=fit.get("exponent"),
                )
            output = data.get("output") or {}
            if not isinstance(output, OutputSpec):
                data["output"] = OutputSpec(
                    path=output.get("path"),
                    format=output.get("format", OutputFormat.CSV.value),
                )
            for key in ("scales", "ps", "alphas"):
                if data.get(key) is None:
                    data.pop(key, None)
            return cls(**{k: v for k, v in data.items() if v is not None})
        except ConfigError:
            raise
        except (TypeError, ValueError) as e:
            raise ConfigError(f"Invalid configuration: {e}") from None


def load_yaml(path: Path) -> Dict[str, Any]:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            data = yaml.safe_load(handle) or {}
    except yaml.YAMLError as e:
        raise ConfigError(f"Cannot parse config file {path}: {e}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"Config file {path} must hold a mapping")
    logger.debug(f"Loaded configuration from {path}")
    return data


def merge(base: Dict[str, Any], overrides: Dict[str, Any]) -> Dict[str, Any]:
    """Recursive dict merge; None in overrides leaves base untouched"""
    merged = dict(base)
    for key, value in overrides.items():
        if value is None:
            continue
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = merge(merged[key], value)
        else:
            merged[key] = value
    return merged
