"""HNN extensions of finite compact quantum groups, with numerical certificates."""

__version__ = "0.1.0"
