"""Exact verification engine for the module theory of a ring epimorphism.

Two hardcoded instance families: localization of Q[x] at a finite set of
rational points, and 2x2 matrix rings over localized Q[x] viewed through
Kronecker quiver representations. All arithmetic is exact.
"""

__version__ = "0.1.0"
