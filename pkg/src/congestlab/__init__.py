"""Simulation of round-synchronous distributed graph protocols.

The package provides a bandwidth-checked simulator for the Congested Clique
and CONGEST models together with protocols for approximate and exact girth,
subgraph listing and even-cycle detection.
"""
from congestlab.graph import (
    INF,
    CycleWitness,
    Graph,
    GraphFormatError,
    Instance,
    SubgraphPattern,
)

__all__ = [
    "INF",
    "CycleWitness",
    "Graph",
    "GraphFormatError",
    "Instance",
    "SubgraphPattern",
]

__version__ = "0.1.0"
