"""Core numerical models and services."""
