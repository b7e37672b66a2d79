"""Core functionality for dowling-reps."""
