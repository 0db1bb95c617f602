"""Hot counting kernels: compiled extension when available, pure Python otherwise.

Set ``COHTM_PURE_PYTHON=1`` to force the fallback (used by the benchmark).
"""

import os

from cohtm._kernels import cooc_py

if os.environ.get("COHTM_PURE_PYTHON") == "1":
    HAVE_COMPILED = False
    count_windows = cooc_py.count_windows
else:
    try:
        from cohtm._kernels._cooc import count_windows

        HAVE_COMPILED = True
    except ImportError:
        HAVE_COMPILED = False
        count_windows = cooc_py.count_windows

__all__ = ["HAVE_COMPILED", "cooc_py", "count_windows"]
