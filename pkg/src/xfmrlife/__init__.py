"""Distribution transformer aging under EV, PV and battery scenarios."""

__version__ = "0.1.0"
