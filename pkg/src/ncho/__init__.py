"""Apéry-like numbers of the non-commutative harmonic oscillator and their modular companions."""
