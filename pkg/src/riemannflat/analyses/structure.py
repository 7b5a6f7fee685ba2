"""
Structure functions
S_p(l) over exponents p and grid-snapped increment scales l
"""

from riemannflat.analyses.base_analysis import AnalysisResult, BaseAnalysis
from riemannflat.core.norms import structure_function, structure_table

DEFAULT_EXPONENTS = (2.0, 4.0)


class StructureAnalysis(BaseAnalysis):
    """Structure-function table of the configured series"""

    @property
    def command(self) -> str:
        return "structure"

    @property
    def description(self) -> str:
        return "Structure functions S_p(l) of the configured series"

    def compute(self) -> AnalysisResult:
        ps = self.config.ps or DEFAULT_EXPONENTS
        grid_size = self.config.grid_size
        table = structure_table(
            self.series,
            ps,
            self.config.scales,
            grid_size=grid_size,
            threads=self.config.threads,
            metadata={"series": self.config.series.to_dict()},
        )

        result = AnalysisResult(columns=["ell_requested", "ell", "p", "value"])
        for row in table.rows:
            result.add_row(row.ell_requested, row.ell, row.p, row.value)
        result.provenance["snapped_scales"] = sorted({row.ell for row in table.rows})
        result.provenance["grid_size"] = grid_size

        ell_min = min(self.config.scales)
        reference = structure_function(self.series, 2.0, ell_min, grid_size)
        self.enforce_truncation(result, reference=reference, ell_min=ell_min)
        return result
