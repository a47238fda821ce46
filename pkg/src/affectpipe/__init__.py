"""Multimodal physiological emotion classification pipeline.

Feature extraction for EEG, ECG, GSR and face video, self-report baseline
compensation, and extreme-learning-machine classification with early fusion.
"""

from ._kernels import USING_COMPILED, backend_name

__version__ = "0.1.0"

__all__ = ["USING_COMPILED", "backend_name", "__version__"]
