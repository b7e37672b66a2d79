"""Group presentations and the scrambling and augmentation constructions."""
