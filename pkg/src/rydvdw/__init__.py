"""Van der Waals interactions of Zeeman-degenerate Rydberg atom pairs."""

__version__ = "0.1.0"
