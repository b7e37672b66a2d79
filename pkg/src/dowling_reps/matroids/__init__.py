"""Matroids and generalized Dowling geometries."""
