"""Servicios de simulación y tomografía."""
