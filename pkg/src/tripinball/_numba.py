"""JIT toggle for the hot kernels.

The kernels in :mod:`tripinball._kernels` are written once and compiled with
numba's ``@njit`` when it is available.  Setting the environment variable
``TRIPINBALL_DISABLE_NUMBA=1`` (before import) selects the pure-Python/numpy
fallback path instead; the same source runs uncompiled, so both paths produce
identical numbers.  ``benchmarks/bench_kernels.py`` compares the two.
"""

import functools
import os

import numpy as np

NUMBA_DISABLED = os.environ.get("TRIPINBALL_DISABLE_NUMBA", "0").lower() not in (
    "",
    "0",
    "false",
)

if not NUMBA_DISABLED:
    try:
        from numba import njit as _numba_njit
    except ImportError:  # pragma: no cover - numba is a declared dependency
        NUMBA_DISABLED = True

if NUMBA_DISABLED:

    def njit(*args, **kwargs):
        """Fallback decorator: run the kernel as plain Python.

        uint64 mixing in the RNG wraps on purpose; silence numpy's scalar
        overflow warning so the fallback is as quiet as the compiled path.
        """

        def decorate(func):
            @functools.wraps(func)
            def wrapper(*a, **k):
                with np.errstate(over="ignore"):
                    return func(*a, **k)

            wrapper.py_func = func
            return wrapper

        if args and callable(args[0]):
            return decorate(args[0])
        return decorate

else:

    def njit(*args, **kwargs):
        return _numba_njit(*args, **kwargs)
