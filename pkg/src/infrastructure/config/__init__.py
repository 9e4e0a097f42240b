"""Configuration loading and management."""
