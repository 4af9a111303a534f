"""visage: near-real-time facial expression recognition from frame sequences."""

__version__ = "0.1.0"
