"""Diagonal-catalyst quantum adiabatic optimization: spectra, mean-field
landscapes, semiclassical trajectories and perturbative crossings."""

__version__ = "0.1.0"
