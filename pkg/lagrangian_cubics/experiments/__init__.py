"""Experiment runner and report helpers."""
