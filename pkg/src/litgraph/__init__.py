"""Literature mining toolkit: citation expansion from seed papers, entity
content-density filtering, and temporal graph analytics."""

__version__ = "0.1.0"
