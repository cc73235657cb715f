"""Reduced dynamics and entanglement of two double quantum dots in
thermal black-body radiation: kernels, exact density-matrix map,
Wootters measures, parameter scans, and an effective-interaction
cross-check."""

__version__ = "0.1.0"
