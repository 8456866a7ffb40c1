"""Equivalence checking for imperative and MapReduce-style programs.

Programs are written in a small imperative language (IL), translated into a
typed functional core (FFL), and related step by step along a user-supplied
chain of intermediate programs.
"""

__version__ = "0.1.0"
