"""Quasihyperbolic geometry, uniformity checks and Koebe uniformization of planar domains."""

from __future__ import annotations

import os

# Cap BLAS threads before numpy loads, if requested.
_threads = os.environ.get("CIRCUMA_THREADS")
if _threads:
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ.setdefault(_var, _threads)

from .domain import (INF, Curve, Disc, DomainSpec, HalfPlane, Point, Polyline, Segment,  # noqa: E402
                     load_domain, dump_domain)
from .errors import CircumaError  # noqa: E402

__all__ = ["INF", "Curve", "Disc", "DomainSpec", "HalfPlane", "Point", "Polyline", "Segment",
           "load_domain", "dump_domain", "CircumaError"]
__version__ = "0.1.0"
