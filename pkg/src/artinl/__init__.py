"""Abelian Artin L-functions on open subsets of P^1 over finite fields.

Exact computation of ramification invariants, Hodge and Newton polygons,
L-polynomials from character sums, cyclic-cover slope bounds, and a
Dwork-operator cross-check of the trace formula.
"""

from __future__ import annotations

__version__ = "0.1.0"
