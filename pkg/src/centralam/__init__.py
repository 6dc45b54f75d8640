"""Exact central amenability constants of finite groups from their character tables."""

__version__ = "0.1.0"
