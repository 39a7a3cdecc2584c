"""Leads-to synthesis and checking for symmetric unidirectional rings."""

__version__ = "0.1.0"
