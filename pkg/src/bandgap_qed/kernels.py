"""Backend selection for the hot kernels.

The compiled extension is used when it imports; otherwise the numpy fallback.
Set ``BANDGAP_QED_PURE=1`` to force the fallback.
"""
import os

if os.environ.get("BANDGAP_QED_PURE", "") not in ("", "0"):
    from . import _kernels_py as _impl
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl
        BACKEND = "cython"
    except ImportError:
        from . import _kernels_py as _impl
        BACKEND = "python"

uniforms = _impl.uniforms
sample_sites = _impl.sample_sites
search_overlap = _impl.search_overlap
hopping_matrix = _impl.hopping_matrix
raising_matrix = _impl.raising_matrix

__all__ = ["BACKEND", "uniforms", "sample_sites", "search_overlap",
           "hopping_matrix", "raising_matrix"]
