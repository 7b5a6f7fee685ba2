"""
High-pass filter norms
Tabulates ||f_{>=N}||_2^2, ||f_{>=N}||_4^4 and the flatness F(N) over a sweep of cutoffs
"""

import math

from riemannflat.analyses.base_analysis import AnalysisResult, BaseAnalysis
from riemannflat.core.errors import UndefinedFlatnessError
from riemannflat.core.intermittency import Axis, Quantity, sweep


class FilterNormsAnalysis(BaseAnalysis):
    """L^2 and L^4 sizes of the high-pass parts f_{>=N}"""

    @property
    def command(self) -> str:
        return "filter-norms"

    @property
    def description(self) -> str:
        return "L^2 / L^4 norms of high-pass filtered series"

    def compute(self) -> AnalysisResult:
        cutoffs = self.integer_scales()
        threads = self.config.threads
        l2 = sweep(self.series, Axis.FILTER_CUTOFF, cutoffs, Quantity.L2, threads=threads)
        l4 = sweep(self.series, Axis.FILTER_CUTOFF, cutoffs, Quantity.L4, threads=threads)

        result = AnalysisResult(columns=["N", "l2", "l4", "F", "l2_scaled", "l4_scaled"])
        for (n, a), (_, b) in zip(l2.rows, l4.rows):
            if a == 0:
                raise UndefinedFlatnessError(f"High-pass part above N={n:g} is empty")
            result.add_row(
                int(n),
                a,
                b,
                b / (a * a),
                a * n ** 1.5,
                self.log_normalized(b * n ** 3, n),
            )

        largest = max(cutoffs)
        self.enforce_truncation(result, reference=l2.values[cutoffs.index(largest)], n_max=largest)
        result.provenance["normalizations"] = {
            "l2_scaled": "l2 * N^(3/2)",
            "l4_scaled": "l4 * N^3 / log N",
        }
        if any(math.isnan(row[-1]) for row in result.rows):
            result.add_warning("l4_scaled is undefined at N=1")
        return result
