"""Joint distributions, entropy and probability-space representations."""
