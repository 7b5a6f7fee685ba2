"""
Series evaluation
Samples the configured series at x_j = j/n by direct summation
"""

import numpy as np

from riemannflat.analyses.base_analysis import AnalysisResult, BaseAnalysis
from riemannflat.core.norms import l2_squared_exact
from riemannflat.core.series_core import SeriesKind, phi_samples


class EvalAnalysis(BaseAnalysis):
    """
    Values of the configured series on a uniform grid

    The trajectory kind evaluates phi itself, linear term included.
    Truncated series are checked against their own L^2 mass.
    """

    @property
    def command(self) -> str:
        return "eval"

    @property
    def description(self) -> str:
        return "Evaluate the configured series on a uniform grid"

    def compute(self) -> AnalysisResult:
        count = self.config.samples
        points = np.arange(count, dtype=np.float64) / max(count, 1)

        if self.config.series.kind is SeriesKind.TRAJECTORY:
            values = phi_samples(points, self.config.series.truncation)
        else:
            values = self.series.evaluate(points)

        result = AnalysisResult(columns=["x", "re", "im"])
        for x, v in zip(points, values):
            result.add_row(float(x), float(v.real), float(v.imag))
        result.provenance["tail_bound"] = self.config.series.tail_bound()

        if self.config.series.kind is SeriesKind.TRAJECTORY:
            self.enforce_phi_truncation(result, values)
        else:
            self.enforce_truncation(result, reference=l2_squared_exact(self.series))
        return result
