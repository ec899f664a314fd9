"""Hot-kernel backend selection.

The compiled extension is preferred; the pure-numpy fallback is used when the
extension is unavailable or when ``LATNET_PURE_PYTHON`` is set (useful for
parity tests and benchmarks). Both expose the same functions with identical
semantics.
"""

import os

from . import _py

if os.environ.get("LATNET_PURE_PYTHON"):
    _impl = _py
    BACKEND = "python"
else:
    try:
        from . import _speedups as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _py
        BACKEND = "python"

dist_loglik_dyads = _impl.dist_loglik_dyads
dist_update_positions = _impl.dist_update_positions
eigen_loglik_dyads = _impl.eigen_loglik_dyads
eigen_update_positions = _impl.eigen_update_positions
eigen_update_lambda = _impl.eigen_update_lambda
class_block_stats = _impl.class_block_stats
class_gibbs_labels = _impl.class_gibbs_labels
class_loglik_dyads = _impl.class_loglik_dyads
