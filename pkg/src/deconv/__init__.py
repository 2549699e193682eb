"""UNL-to-French deconversion engine with interactive postedition support."""

__version__ = "0.1.0"
