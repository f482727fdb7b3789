"""Supervised dimensionality reduction and benchmarking for frozen-feature classification.

Submodules are imported explicitly (``from discbench import reducers``) to keep
startup light; the CLI applies thread caps before any numeric import.
"""

__version__ = "0.1.0"
