"""Configuration, orchestration, reports and the command-line interface."""

from hhladder.pipeline.commands import cmd_converge, cmd_dump_matrices, cmd_selftest, cmd_spectrum
from hhladder.pipeline.config import RunConfig, load_config, parse_config
from hhladder.pipeline.report import ConvergenceReport, SpectrumReport
