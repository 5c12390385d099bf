"""Joint transmit/receive robust adaptive beamforming for colocated MIMO
radar: steering models, mismatch generators, baseline and
probability-constrained beamformers, a moment-robust probability bound, and
a Monte-Carlo experiment harness."""

__version__ = "0.1.0"
