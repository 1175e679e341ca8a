"""Workflow orchestrators for reach-bounds."""

from reach_bounds.workflows.analysis import AnalysisArtifacts, AnalysisWorkflow

__all__ = ["AnalysisArtifacts", "AnalysisWorkflow"]
