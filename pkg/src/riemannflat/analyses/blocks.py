"""
Littlewood-Paley blocks
Per-block norms of the configured series and the square-function ratio
"""

import math

from riemannflat.analyses.base_analysis import AnalysisResult, BaseAnalysis
from riemannflat.core.norms import l2_squared_exact, l4_fourth, square_function_ratio
from riemannflat.core.spectral import BlockPlan, littlewood_paley_blocks

DEFAULT_EXPONENTS = (4.0,)


class BlocksAnalysis(BaseAnalysis):
    """
    ||Delta_j f||_2^2 and ||Delta_j f||_4^4 for each block [A^j, A^{j+1})

    l4_scaled divides the L^4 power by A^{-3j} log(A^j), the size expected
    of a block of Riemann's series.
    """

    @property
    def command(self) -> str:
        return "blocks"

    @property
    def description(self) -> str:
        return f"Littlewood-Paley blocks with base {self.config.lp_base:g}"

    def compute(self) -> AnalysisResult:
        base = self.config.lp_base
        poly = self.series
        plan = BlockPlan.for_max_freq(base, poly.max_freq)
        blocks = littlewood_paley_blocks(poly, base)

        result = AnalysisResult(columns=["block", "lo", "hi", "modes", "l2", "l4", "l4_scaled"])
        for j, (band, block) in enumerate(zip(plan.blocks, blocks)):
            l4 = l4_fourth(block) if not block.is_empty() else 0.0
            scaled = l4 / (base ** (-3.0 * j) * j * math.log(base)) if j >= 1 else math.nan
            result.add_row(j, float(band.lo), float(band.hi), block.support_size, l2_squared_exact(block), l4, scaled)

        if not poly.is_empty():
            ratios = {}
            for p in self.config.ps or DEFAULT_EXPONENTS:
                ratios[f"{p:g}"] = square_function_ratio(poly, base, p)
                self.logger.info(f"Square-function ratio p={p:g}: {ratios[f'{p:g}']:.6f}")
            result.provenance["square_function_ratio"] = ratios

        self.enforce_truncation(result, reference=l2_squared_exact(poly))
        return result
