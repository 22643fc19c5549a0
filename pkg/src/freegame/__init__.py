"""Upper and lower bounds on free non-local games with bounded entanglement."""

__version__ = "0.1.0"
