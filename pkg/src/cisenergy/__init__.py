"""Energy and timing estimation for computational CMOS image sensors."""
__version__ = "0.1.0"
