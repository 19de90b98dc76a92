"""An interpreter for a small denotationally specified imperative language."""

__version__ = "0.1.0"
