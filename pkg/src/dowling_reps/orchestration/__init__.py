"""End-to-end reduction pipelines."""
