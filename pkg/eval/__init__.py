"""Synthetic-benchmark evaluation harness for the BFAR detector.

Runs the closed-form, Monte Carlo, detector-equivalence and odometry checks
on data generated from a single master seed. No recorded radar data is used.
"""
