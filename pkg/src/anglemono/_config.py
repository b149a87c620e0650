"""Tolerances and the numba switch.

``ANGLEMONO_EPS`` overrides the relative length tolerance (multiplied by the
bounding-box diameter of whatever geometry is being tested).
``ANGLEMONO_NUMBA=0`` forces the pure-numpy kernels even when numba is
installed.
"""
import os

EPS_ANG = 1e-9
EPS_LEN_REL = float(os.environ.get("ANGLEMONO_EPS", "1e-9"))


def _numba_requested() -> bool:
    flag = os.environ.get("ANGLEMONO_NUMBA", "1").strip().lower()
    return flag not in ("0", "false", "no", "off")


try:
    import numba  # noqa: F401
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and _numba_requested()


def eps_len(points) -> float:
    """Absolute length tolerance for a point cloud."""
    import numpy as np

    pts = np.asarray(points, dtype=float)
    if pts.size == 0:
        return EPS_LEN_REL
    pts = pts.reshape(len(pts), -1)
    diam = float(np.linalg.norm(pts.max(axis=0) - pts.min(axis=0)))
    return EPS_LEN_REL * (diam if diam > 0 else 1.0)
