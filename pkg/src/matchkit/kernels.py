"""Backend selection for the hot loops.

The compiled extension ``matchkit._ckernels`` is used when it was built;
otherwise (or when ``MATCHKIT_PURE_PYTHON=1``) the pure-Python twins run.
Both expose identical signatures and results.
"""

import os

from matchkit import _pykernels

BACKEND = "python"
_impl = _pykernels

if os.environ.get("MATCHKIT_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from matchkit import _ckernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels

gale_shapley = _impl.gale_shapley
rotation_chase = _impl.rotation_chase
sr_stable_matchings = _impl.sr_stable_matchings
sm_stable_matchings = _impl.sm_stable_matchings
