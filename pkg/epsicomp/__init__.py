"""
epsicomp: epsilon-complexity of continuous functions.

The service layer (``epsicomp.service``) holds the computations, the
storage layer (``epsicomp.storage``) reads and writes artifacts.
"""

__version__ = "0.0.1a1"
