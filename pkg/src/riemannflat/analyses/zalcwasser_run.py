"""
Gauss-sum norms against Zalcwasser's law
"""

from riemannflat.analyses.base_analysis import AnalysisResult, BaseAnalysis
from riemannflat.core.zalcwasser import ratio_bracket, ratio_sweep


class ZalcwasserAnalysis(BaseAnalysis):
    """int |D_N|^p / psi_p(N) for every configured p and N"""

    @property
    def command(self) -> str:
        return "zalcwasser"

    @property
    def description(self) -> str:
        return "L^p norms of quadratic Gauss sums against psi_p(N)"

    def compute(self) -> AnalysisResult:
        ns = self.integer_scales()
        result = AnalysisResult(columns=["p", "N", "value", "psi", "ratio"])
        brackets = {}

        for p in self.config.ps:
            table = ratio_sweep(p, ns, threads=self.config.threads)
            powers = table.metadata["powers"]
            laws = table.metadata["psi"]
            for n, value, law, (_, ratio) in zip(ns, powers, laws, table.rows):
                result.add_row(p, n, value, law, ratio)
            low, high = ratio_bracket(table)
            brackets[f"{p:g}"] = {"law": table.metadata["law"], "min": low, "max": high, "spread": high / low}
            self.logger.info(f"p={p:g}: ratio bracket [{low:.6g}, {high:.6g}]")

        result.provenance["brackets"] = brackets
        result.provenance["truncation"] = {"exact": True, "max_terms": max(ns)}
        return result
