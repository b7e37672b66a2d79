"""Permutation groups, finite quotients and sofic witnesses."""
