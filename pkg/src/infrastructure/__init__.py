"""Infrastructure layer: configuration, logging and result persistence."""
