"""Entanglement of random local-circuit states: exact swap-operator averages and Monte Carlo."""

from .algebra import PermPolynomial, average_purity, iterate, purity_of
from .ensemble import EnsembleSpec
from .graph import QuditGraph, build_chain, build_cycle, interval_mask
from .montecarlo import PurityStats, run_ensemble

__version__ = "0.1.0"
