"""
Run Engine - Dispatches a run configuration to its analysis
Builds the result envelope (config echo, payload, provenance) and hands it to the writer
"""

import logging
from pathlib import Path
from typing import Dict, Optional, Type, Union

from riemannflat import __version__
from riemannflat.analyses.base_analysis import BaseAnalysis
from riemannflat.analyses.blocks import BlocksAnalysis
from riemannflat.analyses.eval_series import EvalAnalysis
from riemannflat.analyses.filter_norms import FilterNormsAnalysis
from riemannflat.analyses.fit import FitAnalysis
from riemannflat.analyses.flatness import FlatnessAnalysis
from riemannflat.analyses.spectrum import SpectrumAnalysis
from riemannflat.analyses.structure import StructureAnalysis
from riemannflat.analyses.trajectory import TrajectoryAnalysis
from riemannflat.analyses.zalcwasser_run import ZalcwasserAnalysis
from riemannflat.config.run_config import Command, RunConfig
from riemannflat.core.result_writer import OutputFormat, ResultEnvelope, ResultWriter

TOOL_NAME = "riemannflat"


class RunEngine:
    """
    Core engine that runs one command per configuration
    """

    def __init__(self, writer: Optional[ResultWriter] = None):
        """
        Initialize the run engine

        Args:
            writer: Result writer used by emit (optional)
        """
        self.logger = logging.getLogger(__name__)
        self.writer = writer or ResultWriter()

        # Registry of available analyses
        self._analysis_registry: Dict[Command, Type[BaseAnalysis]] = {
            Command.EVAL: EvalAnalysis,
            Command.FILTER_NORMS: FilterNormsAnalysis,
            Command.STRUCTURE: StructureAnalysis,
            Command.FLATNESS: FlatnessAnalysis,
            Command.ZALCWASSER: ZalcwasserAnalysis,
            Command.FIT: FitAnalysis,
            Command.SPECTRUM: SpectrumAnalysis,
            Command.TRAJECTORY: TrajectoryAnalysis,
            Command.BLOCKS: BlocksAnalysis,
        }

    def get_available_commands(self) -> Dict[str, str]:
        """Command name -> analysis class name"""
        return {command.value: cls.__name__ for command, cls in self._analysis_registry.items()}

    def run(self, config: RunConfig) -> ResultEnvelope:
        """
        Execute the analysis a configuration names

        Args:
            config: Validated run configuration

        Returns:
            ResultEnvelope whose payload matches the command

        Raises:
            RiemannFlatError: the computation failed, including inadequate truncation
        """
        analysis_class = self._analysis_registry[config.command]
        analysis = analysis_class(config)
        result = analysis.execute()

        provenance = {
            "tool": TOOL_NAME,
            "version": __version__,
            "series": config.series.to_dict(),
            "k_max": config.series.truncation,
            "tail_bound": config.series.tail_bound(),
            "columns": list(result.columns),
        }
        provenance.update(result.provenance)
        if result.warnings:
            provenance["warnings"] = list(result.warnings)

        return ResultEnvelope(
            command=config.command.value,
            config=config.to_dict(),
            provenance=provenance,
            columns=list(result.columns),
            rows=list(result.rows),
            warnings=list(result.warnings),
        )

    def emit(
        self,
        envelope: ResultEnvelope,
        fmt: OutputFormat,
        path: Union[str, Path],
    ) -> Union[str, Path]:
        """Write an envelope as CSV or JSON to path ("-" for stdout)"""
        return self.writer.write(envelope, fmt, path)

    def run_and_emit(self, config: RunConfig) -> ResultEnvelope:
        """Run a configuration and write its envelope to the configured target"""
        envelope = self.run(config)
        target = self.emit(envelope, config.output.format, config.output_target())
        self.logger.info(f"{config.command.value} finished, output: {target}")
        return envelope
