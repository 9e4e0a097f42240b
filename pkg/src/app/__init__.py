"""Application entry point and command-line surface."""
