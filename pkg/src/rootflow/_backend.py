"""Kernel selection: compiled extension if available, pure Python otherwise.

Set ``ROOTFLOW_PURE=1`` to force the pure-Python kernel even when the
compiled one is importable (used by the benchmark and the equivalence tests).
"""

from __future__ import annotations

import os

import numpy as np

from . import _purekernel

try:
    from . import _fastkernel  # type: ignore[attr-defined]
    HAVE_COMPILED = True
except ImportError:
    _fastkernel = None  # type: ignore[assignment]
    HAVE_COMPILED = False

FORCE_PURE = os.environ.get("ROOTFLOW_PURE", "") not in ("", "0")
BACKEND = "compiled" if (HAVE_COMPILED and not FORCE_PURE) else "python"


def integrate_poly_arrays(nvars, offs, coeffs, exps, y0, t0, t1, rtol, atol,
                          sample_ts, max_steps, *, force_pure=False):
    """Run the stepping kernel over flattened polynomial term arrays.

    Returns ``(samples, status, t_reached, n_accept, n_reject)`` with
    ``samples`` a list of state tuples, one per emitted sample time.
    """
    use_compiled = HAVE_COMPILED and not FORCE_PURE and not force_pure
    if use_compiled:
        sample_arr = np.asarray(sample_ts, dtype=np.float64)
        out = np.empty((sample_arr.shape[0], nvars), dtype=np.complex128)
        n_filled, status, t_reached, na, nr = _fastkernel.integrate_poly(
            nvars,
            np.asarray(offs, dtype=np.int64),
            np.asarray(coeffs, dtype=np.complex128),
            np.asarray(exps, dtype=np.int32),
            np.asarray(y0, dtype=np.complex128),
            float(t0), float(t1), float(rtol), float(atol),
            sample_arr, out, int(max_steps))
        samples = [tuple(complex(v) for v in out[i]) for i in range(n_filled)]
        return samples, status, t_reached, na, nr
    samples, n_filled, status, t_reached, na, nr = _purekernel.integrate_poly(
        nvars, list(offs), list(coeffs), list(exps),
        list(y0), float(t0), float(t1), float(rtol), float(atol),
        list(sample_ts), int(max_steps))
    return samples, status, t_reached, na, nr
