"""Permutation groups, local actions of vertex-transitive digraphs and quasiprimitive types."""

__version__ = "0.1.0"
