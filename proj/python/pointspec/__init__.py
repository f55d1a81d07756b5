"""Spectral statistics of a 1D particle with scale-free point interactions.

Thin wrapper over the C++ core (the ``_pointspec`` extension): secular
functions and transfer matrices, a certified-complete root finder, spacing
statistics, and Wigner / GOE / Poisson references.
"""

try:
    from ._pointspec import *  # noqa: F401,F403
    from ._pointspec import __version__  # noqa: F401
except ImportError:  # extension built outside the package (dev tree)
    from _pointspec import *  # noqa: F401,F403
    from _pointspec import __version__  # noqa: F401


def goe_table_path():
    """Path of the GOE spacing-CDF table shipped with the package, if any."""
    from pathlib import Path

    p = Path(__file__).parent / "data" / "goe_table.txt"
    return str(p) if p.exists() else ""
