"""Volterra type operators on weighted spaces of analytic functions."""
