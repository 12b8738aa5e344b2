"""Dual-graph calculus for divisors of singular holomorphic foliations."""

__version__ = "0.1.0"
