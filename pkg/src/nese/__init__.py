"""Near-sensor event-detection simulator.

Subsampled, precision-limited background comparison against a non-volatile
memory store, with calibrated power accounting and an intermittent-power
execution model.
"""

__version__ = "0.1.0"
