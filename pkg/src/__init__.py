"""HOM Tomography Lab - two-photon (HOM / Swap Test) tomography of single-photon qubits."""

__version__ = "1.0.0"
__author__ = "HOMTomoLab Team"
