"""Phonon modes of levitated nanodiamonds and NV strain-coupled gates."""

__version__ = "0.1.0"
