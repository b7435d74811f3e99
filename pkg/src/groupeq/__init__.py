"""Equations and inequations over free groups and Dehn-presented groups."""
__version__ = "0.1.0"
