"""
Base Analysis - Abstract base class for all toolkit commands
Provides common plumbing (series construction, truncation checks, result collection)
"""

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from riemannflat.config.run_config import RunConfig
from riemannflat.core.errors import InvalidArgumentError, RiemannFlatError, TruncationError
from riemannflat.core.norms import TruncationCheck, check_truncation
from riemannflat.core.series_core import SeriesKind, TrigPolynomial, phi_tail_bound


@dataclass
class AnalysisResult:
    """Table and provenance produced by one analysis"""
    columns: List[str]
    rows: List[Tuple[Any, ...]] = field(default_factory=list)
    provenance: Dict[str, Any] = field(default_factory=dict)
    warnings: List[str] = field(default_factory=list)

    def add_row(self, *values: Any) -> None:
        """Append a row, converting numpy scalars to plain Python values"""
        self.rows.append(tuple(_plain(v) for v in values))

    def add_warning(self, warning: str) -> None:
        """Add a warning message to the result"""
        self.warnings.append(warning)


def _plain(value: Any) -> Any:
    if hasattr(value, "item"):
        return value.item()
    return value


class BaseAnalysis(ABC):
    """
    Abstract base class for all toolkit commands

    Each command inherits from this class and implements compute().
    """

    # Series whose truncation is checked against the measured quantity
    TRUNCATED_KINDS = (SeriesKind.RIEMANN, SeriesKind.INCREMENT)

    def __init__(self, config: RunConfig):
        """
        Initialize the analysis

        Args:
            config: Validated run configuration
        """
        self.config = config
        self.logger = logging.getLogger(self.__class__.__name__)
        self._series: Optional[TrigPolynomial] = None

    @property
    @abstractmethod
    def command(self) -> str:
        """CLI command this analysis answers"""
        pass

    @property
    @abstractmethod
    def description(self) -> str:
        """Human-readable description of this analysis"""
        pass

    @abstractmethod
    def compute(self) -> AnalysisResult:
        """
        Run the computation

        Returns:
            AnalysisResult with the payload table
        """
        pass

    def execute(self) -> AnalysisResult:
        """
        Validate, compute and log the analysis

        Raises:
            RiemannFlatError: the computation failed; the message is typed
        """
        self.logger.info(f"Starting {self.command}: {self.description}")
        self.validate_preconditions()
        try:
            result = self.compute()
        except RiemannFlatError as e:
            self.logger.error(f"{self.command} failed: {type(e).__name__}: {e}")
            raise

        self.logger.info(f"{self.command} produced {len(result.rows)} rows")
        for warning in result.warnings:
            self.logger.warning(warning)
        return result

    def validate_preconditions(self) -> None:
        """Override to reject configurations the command cannot run"""
        self.logger.debug("Preconditions passed")

    @property
    def series(self) -> TrigPolynomial:
        """Polynomial described by the configured SeriesSpec, built once"""
        if self._series is None:
            spec = self.config.series
            self._series = spec.build()
            self.logger.info(
                f"Built {spec.kind.value} series: truncation {spec.truncation}, "
                f"{self._series.support_size} modes, max_freq {self._series.max_freq}"
            )
        return self._series

    def is_truncated_series(self) -> bool:
        return self.config.series.kind in self.TRUNCATED_KINDS

    def enforce_truncation(
        self,
        result: AnalysisResult,
        reference: float,
        ell_min: Optional[float] = None,
        n_max: Optional[int] = None,
    ) -> Optional[TruncationCheck]:
        """
        Record the truncation check in the provenance and fail if it does not hold

        Finite series (Gauss sums, trajectory part) are recorded as exact.
        """
        if not self.is_truncated_series():
            result.provenance["truncation"] = {"exact": True}
            return None

        check = check_truncation(
            self.config.series.truncation,
            reference,
            ell_min=ell_min,
            n_max=n_max,
            tolerance=self.config.tail_tolerance,
        )
        result.provenance["truncation"] = check.to_dict()
        self.logger.info(
            f"Truncation K_max={check.k_max} (required {check.required_k_max}), "
            f"tail ratio {check.tail_ratio:.3e}"
        )
        check.raise_if_inadequate()
        return check

    def enforce_phi_truncation(self, result: AnalysisResult, values: np.ndarray) -> None:
        """
        Check the omitted tail of phi against the largest sampled |phi|

        The tail 2 sum_{k > sqrt(K_max)} k^-2 must stay below the tail
        tolerance relative to max |phi|.
        """
        k_max = self.config.series.truncation
        tail = phi_tail_bound(k_max)
        scale = float(np.abs(values).max()) if values.size else 0.0
        ratio = tail / scale if scale > 0 else 0.0
        result.provenance["truncation"] = {
            "k_max": k_max,
            "tail_bound": tail,
            "reference": scale,
            "tail_ratio": ratio,
            "tolerance": self.config.tail_tolerance,
        }
        if values.size and not ratio < self.config.tail_tolerance:
            raise TruncationError(
                f"Trajectory tail {tail:.3e} is {ratio:.3e} of max |phi| "
                f"(tolerance {self.config.tail_tolerance:g}); raise K_max"
            )

    def integer_scales(self) -> List[int]:
        """Configured scales as filter cutoffs N >= 1"""
        cutoffs = []
        for s in self.config.scales:
            if not float(s).is_integer() or s < 1:
                raise InvalidArgumentError(f"Filter cutoffs must be positive integers, got {s:g}")
            cutoffs.append(int(s))
        return cutoffs

    @staticmethod
    def log_normalized(value: float, scale: float) -> float:
        """value / |log scale|, NaN at scale 1"""
        log_scale = abs(math.log(scale))
        return value / log_scale if log_scale > 0 else math.nan
