"""Modelos de dominio: estados, fuentes, circuitos, modos y registros."""
