"""Smooth-section densities over finite fields.

Predicts densities of smooth hypersurface sections via truncated zeta Euler
products, measures them by exhaustive or Monte-Carlo enumeration, and
constructs/verifies the classical example objects (jet-constrained sections,
space-filling curves, anti-Bertini hypersurfaces).
"""

__version__ = "0.1.0"
