"""Plotting helpers built on Matplotlib."""
