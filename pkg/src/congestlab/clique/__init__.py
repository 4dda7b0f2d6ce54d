"""Congested Clique protocols: +1 girth approximation and subgraph listing."""
