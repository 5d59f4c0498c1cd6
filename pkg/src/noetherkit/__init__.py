"""Complex-variable Lagrangian toolkit: realification of complex Lagrangians and
symmetries, Noether-like operators, paired first integrals, and a verified
corpus of worked systems."""

__version__ = "0.1.0"
