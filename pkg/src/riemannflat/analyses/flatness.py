"""
Flatness
F(N) along filter cutoffs or G(l) along increment scales
"""

from riemannflat.analyses.base_analysis import AnalysisResult, BaseAnalysis
from riemannflat.core.errors import UndefinedFlatnessError
from riemannflat.core.intermittency import Axis, Quantity, sweep


class FlatnessAnalysis(BaseAnalysis):
    """
    Flatness in the sense of high-pass filtering (axis N) or of structure
    functions (axis l), with the log-normalized column the divergence laws predict
    """

    @property
    def command(self) -> str:
        return "flatness"

    @property
    def description(self) -> str:
        return "Flatness F(N) or G(l) of the configured series"

    def compute(self) -> AnalysisResult:
        if self.config.axis is Axis.FILTER_CUTOFF:
            return self._filter_flatness()
        return self._structure_flatness()

    def _filter_flatness(self) -> AnalysisResult:
        cutoffs = self.integer_scales()
        l2 = sweep(self.series, Axis.FILTER_CUTOFF, cutoffs, Quantity.L2, threads=self.config.threads)
        l4 = sweep(self.series, Axis.FILTER_CUTOFF, cutoffs, Quantity.L4, threads=self.config.threads)

        result = AnalysisResult(columns=["N", "l2", "l4", "F", "F_over_log"])
        for (n, a), (_, b) in zip(l2.rows, l4.rows):
            if a == 0:
                raise UndefinedFlatnessError(f"High-pass part above N={n:g} is empty")
            flatness = b / (a * a)
            result.add_row(int(n), a, b, flatness, self.log_normalized(flatness, n))

        largest = max(cutoffs)
        self.enforce_truncation(result, reference=l2.values[cutoffs.index(largest)], n_max=largest)
        return result

    def _structure_flatness(self) -> AnalysisResult:
        grid_size = self.config.grid_size
        scales = self.config.scales
        s2 = sweep(self.series, Axis.INCREMENT_SCALE, scales, Quantity.S2, grid_size, self.config.threads)
        s4 = sweep(self.series, Axis.INCREMENT_SCALE, scales, Quantity.S4, grid_size, self.config.threads)

        result = AnalysisResult(columns=["ell_requested", "ell", "S2", "S4", "G", "G_over_log"])
        for requested, (ell, a), (_, b) in zip(scales, s2.rows, s4.rows):
            if a == 0:
                raise UndefinedFlatnessError(f"Increment at l={ell:g} vanishes identically")
            flatness = b / (a * a)
            result.add_row(requested, ell, a, b, flatness, self.log_normalized(flatness, ell))

        smallest = int(s2.scales.argmin())
        self.enforce_truncation(result, reference=s2.values[smallest], ell_min=float(s2.scales[smallest]))
        result.provenance["grid_size"] = grid_size
        return result
