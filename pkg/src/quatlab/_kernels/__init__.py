"""Kernel backend selection.

The compiled Cython extension is preferred; the numpy implementation in
``_py`` is the fallback.  ``QUATLAB_KERNELS=python`` or ``=cython``
forces a backend (the latter raising if the extension is missing), which
the benchmark script uses to compare both.
"""

from __future__ import annotations

import os

from . import _py

_requested = os.environ.get("QUATLAB_KERNELS", "").strip().lower()

if _requested == "python":
    _impl = _py
elif _requested == "cython":
    from . import _cy as _impl
else:
    try:
        from . import _cy as _impl
    except ImportError:
        _impl = _py

BACKEND = _impl.BACKEND
qmul = _impl.qmul
qmul_conj = _impl.qmul_conj
gradient_axis = _impl.gradient_axis
second_diff_axis = _impl.second_diff_axis

__all__ = ["BACKEND", "qmul", "qmul_conj", "gradient_axis", "second_diff_axis"]
