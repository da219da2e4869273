"""Sound event recognition on web audio: crawl, classify, human feedback.

The pipeline crawls candidate audio for each sound event label, cuts it
into fixed overlapped segments, classifies every segment with a CNN over
log-mel + delta patches, ranks segments per class by confidence, and
measures Precision@K against either the query label or majority human
votes collected through the bundled evaluation service.
"""

__version__ = "0.1.0"

from .datasets import DatasetId, LabelVocabulary, Split, builtin_vocabulary
from .errors import WebsedError

__all__ = [
    "DatasetId",
    "LabelVocabulary",
    "Split",
    "builtin_vocabulary",
    "WebsedError",
    "__version__",
]
