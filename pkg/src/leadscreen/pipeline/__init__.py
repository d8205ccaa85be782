"""Staged screening workflow: extract, ingest, predict, flag, refine, filter, select, report."""

from leadscreen.pipeline.config import STAGES, PipelineConfig, load_config
from leadscreen.pipeline.stages import Pipeline, run_adapter

__all__ = ["STAGES", "Pipeline", "PipelineConfig", "load_config", "run_adapter"]
