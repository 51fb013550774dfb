"""Self-similar gradient blowup in the (5+1)-dimensional co-rotational Skyrme model."""

__version__ = "0.1.0"
