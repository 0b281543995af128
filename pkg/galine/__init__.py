"""
Galine: verification and simulation engine for cocycle representations
of the Galilean line group
"""

__version__ = "0.1.0"
