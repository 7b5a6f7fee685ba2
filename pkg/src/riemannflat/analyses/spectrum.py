"""
Multifractal spectrum
Legendre transform of the scaling exponents next to the closed-form spectrum
"""

from riemannflat.analyses.base_analysis import AnalysisResult, BaseAnalysis
from riemannflat.core.intermittency import default_p_grid, spectrum_rows

DEFAULT_P_MAX = 12.0


class SpectrumAnalysis(BaseAnalysis):
    """d(a) = min_p (a p - zeta(p) + 1) with zeta = 3p/4 or 1 + p/2"""

    @property
    def command(self) -> str:
        return "spectrum"

    @property
    def description(self) -> str:
        return "Legendre spectrum of Riemann's scaling exponents"

    def compute(self) -> AnalysisResult:
        p_max = max(self.config.ps) if self.config.ps else DEFAULT_P_MAX
        grid = default_p_grid(p_max)

        result = AnalysisResult(columns=["alpha", "legendre", "closed_form"])
        for alpha, legendre, closed in spectrum_rows(self.config.alphas, grid):
            result.add_row(alpha, legendre, closed)

        result.provenance["p_grid"] = {"min": float(grid[0]), "max": float(grid[-1]), "points": int(grid.size)}
        result.provenance["truncation"] = {"exact": True}
        return result
