"""Simulation and verification toolkit for the compiled 5-qubit order-finding
circuit that factors 21 with a=4."""

__version__ = "0.1.0"
