"""Waiting-time laws for a periodic-arrival queue with vacations and a deadline."""

try:
    from ._vacq import *  # noqa: F401,F403  (installed wheel: vacq/_vacq.so)
    from ._vacq import __doc__  # noqa: F401
except ImportError:
    from _vacq import *  # noqa: F401,F403  (build tree: _vacq.so on PYTHONPATH)
    from _vacq import __doc__  # noqa: F401

__version__ = "0.1.0"
