"""Finite-time backstepping attitude control of a bench helicopter with an
online-trained RBF disturbance estimator."""

__version__ = "0.1.0"
