"""Learn API migration patterns from before/after code examples and replay them."""

__version__ = "0.1.0"
