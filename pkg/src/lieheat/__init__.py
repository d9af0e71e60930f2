"""Lie symmetry verification for nonlinear heat-type equations."""
