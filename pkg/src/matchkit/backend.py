"""Kernel selection: compiled extension if importable, pure Python otherwise.

Set MATCHKIT_PURE=1 to force the pure-Python kernels even when the compiled
module is present (used by the parity tests and the benchmark).  The selected
implementation is re-exported here; BACKEND names which one won.
"""

import os

if os.environ.get("MATCHKIT_PURE"):
    from matchkit import _mmcore_py as _impl

    BACKEND = "python"
else:
    try:
        from matchkit import _mmcore as _impl  # type: ignore[attr-defined]

        BACKEND = "c"
    except ImportError:
        from matchkit import _mmcore_py as _impl

        BACKEND = "python"

MultiMatchingCore = _impl.MultiMatchingCore
forest_opt = _impl.forest_opt
forest_opt_prefix = _impl.forest_opt_prefix
tree_cert_scan_root = _impl.tree_cert_scan_root
tree_cert_scan_all_roots = _impl.tree_cert_scan_all_roots

AUGMENT_ADD = _impl.AUGMENT_ADD
SWITCH_IN = _impl.SWITCH_IN
SWITCH_OUT = _impl.SWITCH_OUT
SUPPORT_ADD = _impl.SUPPORT_ADD
READD = _impl.READD
