"""Conditional-independence statements and instances."""
