"""Kernel backend selection.

The compiled extension is used when it was built and ``HIGHERSPIN_PURE`` is
unset; otherwise the pure-Python implementation is loaded.
"""

import os

if os.environ.get("HIGHERSPIN_PURE"):
    from higherspin import _pykernels as K
else:
    try:
        from higherspin import _ckernels as K
    except ImportError:  # extension not built
        from higherspin import _pykernels as K

BACKEND = K.BACKEND

add = K.add
axpy = K.axpy
scale = K.scale
mul = K.mul
diff = K.diff
mulvar = K.mulvar
apply_ud = K.apply_ud
apply_dd = K.apply_dd
mul_uu = K.mul_uu
fischer = K.fischer
echelon = K.echelon
nullspace = K.nullspace
rank = K.rank
classify = K.classify
permute_terms = K.permute_terms
