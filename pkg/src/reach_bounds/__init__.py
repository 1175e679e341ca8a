"""reach-bounds: game-based bounds on reachability probabilities of probabilistic programs."""

from reach_bounds.workflows.analysis import AnalysisWorkflow

__version__ = "0.1.0"

__all__ = ["AnalysisWorkflow", "__version__"]
