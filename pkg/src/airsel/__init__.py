"""Query-aware frame selection for video question answering.

A cheap similarity signal seeds an adaptive initial frame set; an iterative
loop then spends a bounded number of expensive relevance-analyzer calls on
the most promising frames and densifies sampling around confirmed ones.
"""

from .config import PipelineConfig
from .pipeline import PipelineRun, select_frames
from .selection import SelectionConfig, SelectionResult, run_selection
from .signal import BudgetConfig, SimilaritySignal, VideoMeta, compute_budget

__all__ = [
    "BudgetConfig",
    "PipelineConfig",
    "PipelineRun",
    "SelectionConfig",
    "SelectionResult",
    "SimilaritySignal",
    "VideoMeta",
    "compute_budget",
    "run_selection",
    "select_frames",
]

__version__ = "0.1.0"
