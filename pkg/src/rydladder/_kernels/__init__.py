"""Hot-loop kernels with a compiled core and a NumPy fallback.

The Cython extension is preferred when it has been built; setting the
environment variable ``RYDLADDER_PURE=1`` forces the NumPy implementation
(used by the benchmark and to test the fallback path).
"""

import os

from . import pure

if os.environ.get("RYDLADDER_PURE"):
    _impl = pure
else:
    try:
        from . import _core as _impl
    except ImportError:
        _impl = pure

BACKEND = _impl.BACKEND

popcounts = _impl.popcounts
interaction_diagonal = _impl.interaction_diagonal
hmatvec = _impl.hmatvec
apply_phases = _impl.apply_phases
x_rotation_all = _impl.x_rotation_all

__all__ = [
    "BACKEND",
    "popcounts",
    "interaction_diagonal",
    "hmatvec",
    "apply_phases",
    "x_rotation_all",
    "pure",
]
