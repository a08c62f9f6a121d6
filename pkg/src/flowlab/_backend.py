"""Kernel backend selection.

The compiled extension is preferred when importable; set FLOWLAB_BACKEND to
"python" or "cython" to force one.  Every kernel entry point is re-exported
here so callers never import a backend module directly.
"""

import os

from . import _kernels_py

_FORCE = os.environ.get("FLOWLAB_BACKEND", "").lower()

if _FORCE == "python":
    _impl = _kernels_py
else:
    try:
        from . import _kernels_cy as _impl
    except ImportError:
        if _FORCE == "cython":
            raise ImportError(
                "FLOWLAB_BACKEND=cython but the compiled kernels are not built"
            )
        _impl = _kernels_py

BACKEND = "cython" if _impl.__name__.endswith("_kernels_cy") else "python"

derive_seed = _impl.derive_seed
philox_words = _impl.philox_words
std_normals = _impl.std_normals
running_max_batch = _impl.running_max_batch
one_point_batch = _impl.one_point_batch
pair_sup_batch = _impl.pair_sup_batch
cloud_diam_batch = _impl.cloud_diam_batch
evolve_cloud = _impl.evolve_cloud

KERNEL_NAMES = (
    "derive_seed",
    "philox_words",
    "std_normals",
    "running_max_batch",
    "one_point_batch",
    "pair_sup_batch",
    "cloud_diam_batch",
    "evolve_cloud",
)


def available_backends():
    """Names of importable kernel backends."""
    out = ["python"]
    try:
        from . import _kernels_cy  # noqa: F401
        out.insert(0, "cython")
    except ImportError:
        pass
    return out


def get_backend(name):
    """Return the raw kernel module for an explicit backend name."""
    if name == "python":
        return _kernels_py
    if name == "cython":
        from . import _kernels_cy
        return _kernels_cy
    raise ValueError(f"unknown backend {name!r}")
