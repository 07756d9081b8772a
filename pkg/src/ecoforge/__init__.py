"""ecoforge: conceptual ecology models compiled into deterministic simulations."""

__version__ = "0.1.0"
