"""Kernel backend selection.

The compiled extension is preferred when it built; otherwise the numpy
fallback is used. Set ``DOS_SLOTTING_KERNELS=python`` (or ``compiled``)
to force a backend, e.g. for the benchmark in benchmarks/bench_kernels.py.
"""

import os

from dos_slotting import _kernels_py

_forced = os.environ.get("DOS_SLOTTING_KERNELS", "").strip().lower()

if _forced == "python":
    _impl = _kernels_py
else:
    try:
        from dos_slotting import _kernels_ext as _impl  # type: ignore[no-redef]
    except ImportError:
        if _forced == "compiled":
            raise ImportError(
                "DOS_SLOTTING_KERNELS=compiled but the extension is not built; "
                "run `pip install -e . --no-build-isolation` or "
                "`python setup.py build_ext --inplace`"
            )
        _impl = _kernels_py

BACKEND = _impl.BACKEND

nearest_available = _impl.nearest_available
nearest_available_with_cost = _impl.nearest_available_with_cost
first_available = _impl.first_available
kth_available = _impl.kth_available
nearest_available_banded = _impl.nearest_available_banded
