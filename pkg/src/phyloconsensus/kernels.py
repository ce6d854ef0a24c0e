"""Selects the compiled or pure-Python radix kernels (see ``dynforest`` for the policy)."""

import os

if os.environ.get("PHYLOCONSENSUS_PURE"):
    from ._kernels_py import GroupStore, counting_sort, frequent_flags, propagate_versions
    BACKEND = "python"
else:
    try:
        from ._kernels import GroupStore, counting_sort, frequent_flags, propagate_versions
        BACKEND = "cython"
    except ImportError:
        from ._kernels_py import GroupStore, counting_sort, frequent_flags, propagate_versions
        BACKEND = "python"

__all__ = ["GroupStore", "counting_sort", "frequent_flags", "propagate_versions", "BACKEND"]
