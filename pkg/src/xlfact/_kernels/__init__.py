"""Hot-kernel backend selection.

The heavy inner loops (FNV-1a feature hashing and the weighted softmax
loss/gradient) live either in the compiled Cython module ``_ckernels``
or in the numpy fallback ``_pykernels``.  Both expose the same
functions with identical semantics; the compiled one is preferred when
importable.  Set ``XLFACT_PURE_PYTHON=1`` to force the fallback.
"""

import os

if os.environ.get("XLFACT_PURE_PYTHON"):
    from . import _pykernels as _impl
else:
    try:
        from . import _ckernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _pykernels as _impl

BACKEND = _impl.BACKEND
fnv1a64 = _impl.fnv1a64
hashed_counts = _impl.hashed_counts
batch_probs = _impl.batch_probs
batch_loss_grad = _impl.batch_loss_grad

__all__ = ["BACKEND", "fnv1a64", "hashed_counts", "batch_probs", "batch_loss_grad"]
