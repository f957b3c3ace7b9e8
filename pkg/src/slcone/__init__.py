"""Equivariant special Legendrian tori in S^5, their period lattices, and the
asymptotically conical special Lagrangian families they generate."""

__version__ = "0.1.0"
