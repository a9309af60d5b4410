"""Transmission expansion planning with energy storage.

Builds the disjunctive mixed-integer model for circuit expansion plus storage
sizing and siting, drives external MIP solvers through MPS files, validates
solutions independently, and exposes the whole pipeline as a FastAPI service
with a thin command-line client.
"""

__version__ = "0.1.0"
