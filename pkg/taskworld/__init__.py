"""Task-world engine: scene validation, task generation, simulation and self-evolution of action flows."""

__version__ = "0.1.0"
