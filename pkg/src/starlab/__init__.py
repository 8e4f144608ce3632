"""Simulation and analysis toolkit for an autonomously corrected
two-qutrit logical qubit stabilized by detuned two-photon sidebands and
lossy readout resonators."""

__version__ = "0.1.0"

from . import codes, config, fitters, lindblad, qspace, rates, starmodel  # noqa: F401
