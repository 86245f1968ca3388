"""Simulation engine, scenario configuration, diagnostics and output."""
