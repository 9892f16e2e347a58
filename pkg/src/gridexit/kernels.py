"""Grid kernel selection: compiled extension if available, else pure Python.

Set ``GRIDEXIT_PURE=1`` to force the pure-Python kernels regardless of
whether the extension built. `ACTIVE` names the selected backend so tests
and benchmarks can report which one ran.
"""

from __future__ import annotations

import os

from . import _kernels_py as pure

_compiled = None
if os.environ.get("GRIDEXIT_PURE", "") != "1":
    try:
        from . import _kernels as _compiled  # type: ignore[attr-defined]
    except ImportError:
        _compiled = None

_backend = _compiled if _compiled is not None else pure
compiled = _compiled
ACTIVE = "compiled" if _compiled is not None else "pure"

rot90 = _backend.rot90
rot180 = _backend.rot180
rot270 = _backend.rot270
hmirror = _backend.hmirror
vmirror = _backend.vmirror
dmirror = _backend.dmirror
cmirror = _backend.cmirror
hconcat = _backend.hconcat
vconcat = _backend.vconcat
upscale = _backend.upscale
downscale = _backend.downscale
replace = _backend.replace
cellwise = _backend.cellwise
canvas = _backend.canvas
compress = _backend.compress
tophalf = _backend.tophalf
bottomhalf = _backend.bottomhalf
lefthalf = _backend.lefthalf
righthalf = _backend.righthalf
crop = _backend.crop
fill = _backend.fill
underfill = _backend.underfill
paint = _backend.paint
ofcolor = _backend.ofcolor
colorcount_grid = _backend.colorcount_grid

KERNEL_NAMES = (
    "rot90", "rot180", "rot270", "hmirror", "vmirror", "dmirror", "cmirror",
    "hconcat", "vconcat", "upscale", "downscale", "replace", "cellwise",
    "canvas", "compress", "tophalf", "bottomhalf", "lefthalf", "righthalf",
    "crop", "fill", "underfill", "paint", "ofcolor", "colorcount_grid",
)
