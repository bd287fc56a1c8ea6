"""lahja: Libyan-vs-other Arabic dialect identification from short texts."""

__version__ = "0.1.0"

from .errors import LahjaError  # noqa: E402
from .textproc import NormalizationConfig, preprocess  # noqa: E402
from .corpus import Document, LabeledCorpus, load_tsv  # noqa: E402

__all__ = ["__version__", "LahjaError", "NormalizationConfig", "preprocess", "Document", "LabeledCorpus", "load_tsv"]
