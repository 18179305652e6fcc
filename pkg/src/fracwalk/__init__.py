"""fracwalk: heavy-tailed CTRW simulation and the fractional diffusion limit."""

__version__ = "0.1.0"
