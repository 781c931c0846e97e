"""Utility modules for the inspection forecasting pipeline."""
