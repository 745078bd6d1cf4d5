"""Aspect-guided customer review summarization."""

from .domain import (
    AnnotationRecord,
    AspectMention,
    ConsolidationMap,
    ErrorLabel,
    ExtractionResult,
    ProductAspectProfile,
    RefreshState,
    Review,
    SelectionResult,
    Sentiment,
    SummaryRecord,
    normalize_aspect,
)

__version__ = "0.1.0"

__all__ = [
    "AnnotationRecord",
    "AspectMention",
    "ConsolidationMap",
    "ErrorLabel",
    "ExtractionResult",
    "ProductAspectProfile",
    "RefreshState",
    "Review",
    "SelectionResult",
    "Sentiment",
    "SummaryRecord",
    "normalize_aspect",
    "__version__",
]
