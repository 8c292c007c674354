"""Kernel backend selection.

Hot numeric loops ship in two flavours: a numba ``@njit`` build and a pure-numpy
build (vectorized, no compilation).  The active flavour is chosen once at import
time from the ``ANCHORSCHED_BACKEND`` environment variable:

    auto   (default) use numba when importable, else numpy
    numba  require numba, fail loudly if missing
    numpy  force the pure-numpy path even when numba is installed

``BACKEND`` reports the choice; the benchmark suite flips it per subprocess to
compare the two paths on identical inputs.
"""

from __future__ import annotations

import os

_requested = os.environ.get("ANCHORSCHED_BACKEND", "auto").strip().lower()
if _requested not in ("auto", "numba", "numpy"):
    raise ValueError(
        "ANCHORSCHED_BACKEND must be one of auto|numba|numpy, got %r" % _requested
    )

HAVE_NUMBA = False
if _requested in ("auto", "numba"):
    try:
        from numba import njit as _njit  # noqa: F401

        HAVE_NUMBA = True
    except ImportError:
        if _requested == "numba":
            raise RuntimeError(
                "ANCHORSCHED_BACKEND=numba but numba is not importable"
            )

USE_NUMBA = HAVE_NUMBA and _requested != "numpy"
BACKEND = "numba" if USE_NUMBA else "numpy"


def jit(func):
    """Compile ``func`` with numba when the numba backend is active.

    Identity decorator on the numpy backend, so the decorated source must be
    valid plain Python as well (it is only ever applied to loop-style kernels
    that have a separate vectorized twin; the undecorated form is kept callable
    for debugging).
    """
    if USE_NUMBA:
        return _njit(cache=True)(func)
    return func
