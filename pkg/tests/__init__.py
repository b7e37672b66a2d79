"""Tests for dowling-reps."""
