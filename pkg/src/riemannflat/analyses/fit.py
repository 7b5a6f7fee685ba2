"""
Scaling-law fit
Least-squares exponent of a swept quantity, optionally with log-correction detection
"""

from riemannflat.analyses.base_analysis import AnalysisResult, BaseAnalysis
from riemannflat.core.intermittency import (
    Axis,
    Quantity,
    detect_log_correction,
    fit_power_law,
    sweep,
)
from riemannflat.core.norms import structure_function

FIT_COLUMNS = [
    "quantity",
    "exponent",
    "exponent_stderr",
    "intercept",
    "r_squared",
    "window_min",
    "window_max",
    "half_exponent_1",
    "half_exponent_2",
    "stable",
    "residual_curvature",
    "curvature_flagged",
    "log_enabled",
    "log_exponent",
    "r2_power_only",
    "r2_with_log",
    "log_coefficient",
]


class FitAnalysis(BaseAnalysis):
    """
    Sweep a quantity and fit log(value) against log(scale)

    When a theoretical exponent is configured the compensated values are also
    tested for a log(1/scale) factor.
    """

    @property
    def command(self) -> str:
        return "fit"

    @property
    def description(self) -> str:
        return f"Power-law fit of {self.config.quantity.value}"

    def compute(self) -> AnalysisResult:
        quantity = self.config.quantity
        axis = quantity.axis
        scales = self.integer_scales() if axis is Axis.FILTER_CUTOFF else list(self.config.scales)
        table = sweep(self.series, axis, scales, quantity, self.config.grid_size, self.config.threads)

        options = self.config.fit
        if options.exponent is None:
            fit = fit_power_law(table, options.window)
        else:
            fit = detect_log_correction(table, options.exponent, options.log_margin, options.window)

        log = fit.log_correction
        result = AnalysisResult(columns=list(FIT_COLUMNS))
        result.add_row(
            quantity.value,
            fit.exponent,
            fit.exponent_stderr,
            fit.intercept,
            fit.r_squared,
            fit.window[0],
            fit.window[1],
            fit.half_window_exponents[0],
            fit.half_window_exponents[1],
            fit.stable,
            fit.residual_curvature,
            fit.curvature_flagged,
            log.enabled if log else False,
            log.exponent if log else float("nan"),
            log.r2_power_only if log else float("nan"),
            log.r2_with_log if log else float("nan"),
            log.log_coefficient if log else float("nan"),
        )
        if not fit.stable:
            result.add_warning(
                f"Half-window exponents {fit.half_window_exponents[0]:.4f} and "
                f"{fit.half_window_exponents[1]:.4f} differ by 0.1 or more"
            )

        result.provenance["table"] = [list(row) for row in table.rows]
        result.provenance["residuals"] = list(fit.residuals)
        self._check_truncation(result, table, axis)
        return result

    def _check_truncation(self, result: AnalysisResult, table, axis: Axis) -> None:
        if axis is Axis.FILTER_CUTOFF:
            largest = int(table.scales.max())
            reference = sweep(self.series, axis, [largest], Quantity.L2).values[0]
            self.enforce_truncation(result, reference=reference, n_max=largest)
        else:
            ell_min = float(table.scales.min())
            reference = structure_function(self.series, 2.0, ell_min, self.config.grid_size)
            self.enforce_truncation(result, reference=reference, ell_min=ell_min)
