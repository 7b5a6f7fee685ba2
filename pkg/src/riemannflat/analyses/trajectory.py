"""
Corner trajectory
Plot-ready samples of phi(t) on [0, 1]
"""

import numpy as np

from riemannflat.analyses.base_analysis import AnalysisResult, BaseAnalysis
from riemannflat.core.series_core import phi_samples


class TrajectoryAnalysis(BaseAnalysis):
    """phi(t) at t_j = j/(n-1), j = 0..n-1"""

    @property
    def command(self) -> str:
        return "trajectory"

    @property
    def description(self) -> str:
        return "Samples of the corner trajectory phi(t)"

    def compute(self) -> AnalysisResult:
        count = self.config.samples
        times = np.linspace(0.0, 1.0, count) if count > 1 else np.zeros(count)
        values = phi_samples(times, self.config.series.truncation)

        result = AnalysisResult(columns=["t", "re", "im"])
        for t, v in zip(times, values):
            result.add_row(float(t), float(v.real), float(v.imag))

        self.enforce_phi_truncation(result, values)
        return result
