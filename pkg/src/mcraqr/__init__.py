"""Multi-carrier Rydberg atomic quantum receiver simulation."""

__version__ = "0.1.0"
