"""Combinatorial tangle invariants: Kauffman-state Alexander polynomials,
clock lattices and peculiar modules over the quiver algebra A^∂."""

__version__ = '0.1.0'
