"""Publication-style figures from cdsim's CSV outputs.

Reads only the simulator's documented file formats (ensemble envelopes,
threshold sweeps, trajectory snapshots, edge lists) and renders envelope
plots, threshold heatmaps and curves, and network state snapshots.
Rendering is deterministic: identical inputs produce identical image bytes.
"""

__version__ = "0.1.0"
