"""Laboratório numérico de variedades sem pontos focais."""

__version__ = "0.4.0"
