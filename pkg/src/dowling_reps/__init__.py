"""dowling-reps - Presentations, Dowling geometries and matroid representations."""

__version__ = "0.1.0"
__author__ = "bdarlt"
__license__ = "MIT"
