"""Numerical core: kernels, measures, potentials, spectra and the worked examples."""
