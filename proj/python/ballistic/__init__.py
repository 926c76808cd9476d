"""Matrix-free transport simulator for discrete Schrodinger operators on Z^d.

The compiled core carries the full API; this package re-exports it.
"""

from ballistic._core import *  # noqa: F401,F403
from ballistic._core import __version__  # noqa: F401
