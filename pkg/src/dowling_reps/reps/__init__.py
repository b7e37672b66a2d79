"""Vector-space representations of matroids."""
