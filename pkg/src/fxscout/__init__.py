"""Particle effect exploration engine.

Represents a particle effect as a pair of semantic descriptor and
spherical-coordinate kinematic behavior, and uses that representation for
similarity search, alignment, and preference-guided interactive exploration.
"""

__version__ = "0.1.0"

ENGINE_VERSION = __version__
