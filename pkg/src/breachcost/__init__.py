"""Social cost of corporate data breaches: ingestion, augmentation, event study and projections."""

__version__ = "0.1.0"
