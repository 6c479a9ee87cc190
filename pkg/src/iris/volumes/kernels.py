"""Resampling kernels: numba-jitted hot paths with a pure-numpy fallback.

Both backends evaluate the same float64 expressions in the same association
order, so their outputs agree bit-for-bit.  Selection: numba is used when it
imports cleanly unless the environment variable ``IRIS_NUMBA`` is set to
``0``/``off``/``false``.

Coordinate convention: output voxel ``o`` samples the source at
``p = matrix @ o + offset`` (voxel units) with edge-clamped trilinear or
nearest-neighbour interpolation.
"""

from __future__ import annotations

import os

import numpy as np

_flag = os.environ.get("IRIS_NUMBA", "1").strip().lower()
_WANT_NUMBA = _flag not in ("0", "off", "false", "no")

if _WANT_NUMBA:
    try:
        import numba
    except ImportError:  # pragma: no cover - numba is a declared dependency
        numba = None
else:
    numba = None


def backend() -> str:
    """Name of the active kernel backend ("numba" or "numpy")."""
    return "numba" if numba is not None else "numpy"


# ---------------------------------------------------------------------------
# numpy reference implementations
# ---------------------------------------------------------------------------

def _grid_coords(out_shape, matrix, offset):
    od, oh, ow = out_shape
    gd, gh, gw = np.meshgrid(
        np.arange(od, dtype=np.float64),
        np.arange(oh, dtype=np.float64),
        np.arange(ow, dtype=np.float64),
        indexing="ij",
    )
    m = np.asarray(matrix, dtype=np.float64)
    t = np.asarray(offset, dtype=np.float64)
    pd = m[0, 0] * gd + m[0, 1] * gh + m[0, 2] * gw + t[0]
    ph = m[1, 0] * gd + m[1, 1] * gh + m[1, 2] * gw + t[1]
    pw = m[2, 0] * gd + m[2, 1] * gh + m[2, 2] * gw + t[2]
    return pd, ph, pw


def _affine_trilinear_numpy(src, matrix, offset, out_shape):
    src = np.asarray(src, dtype=np.float64)
    sd, sh, sw = src.shape
    pd, ph, pw = _grid_coords(out_shape, matrix, offset)
    pd = np.clip(pd, 0.0, sd - 1.0)
    ph = np.clip(ph, 0.0, sh - 1.0)
    pw = np.clip(pw, 0.0, sw - 1.0)
    d0 = np.minimum(pd.astype(np.int64), sd - 2) if sd > 1 else np.zeros_like(pd, np.int64)
    h0 = np.minimum(ph.astype(np.int64), sh - 2) if sh > 1 else np.zeros_like(ph, np.int64)
    w0 = np.minimum(pw.astype(np.int64), sw - 2) if sw > 1 else np.zeros_like(pw, np.int64)
    d1 = np.minimum(d0 + 1, sd - 1)
    h1 = np.minimum(h0 + 1, sh - 1)
    w1 = np.minimum(w0 + 1, sw - 1)
    fd = pd - d0
    fh = ph - h0
    fw = pw - w0
    c000 = src[d0, h0, w0]
    c001 = src[d0, h0, w1]
    c010 = src[d0, h1, w0]
    c011 = src[d0, h1, w1]
    c100 = src[d1, h0, w0]
    c101 = src[d1, h0, w1]
    c110 = src[d1, h1, w0]
    c111 = src[d1, h1, w1]
    # Same association order as the jitted kernel: w, then h, then d.
    e00 = c000 * (1.0 - fw) + c001 * fw
    e01 = c010 * (1.0 - fw) + c011 * fw
    e10 = c100 * (1.0 - fw) + c101 * fw
    e11 = c110 * (1.0 - fw) + c111 * fw
    e0 = e00 * (1.0 - fh) + e01 * fh
    e1 = e10 * (1.0 - fh) + e11 * fh
    return e0 * (1.0 - fd) + e1 * fd


def _affine_nearest_numpy(src, matrix, offset, out_shape):
    src = np.asarray(src)
    sd, sh, sw = src.shape
    pd, ph, pw = _grid_coords(out_shape, matrix, offset)
    di = np.clip(np.floor(pd + 0.5), 0, sd - 1).astype(np.int64)
    hi = np.clip(np.floor(ph + 0.5), 0, sh - 1).astype(np.int64)
    wi = np.clip(np.floor(pw + 0.5), 0, sw - 1).astype(np.int64)
    return src[di, hi, wi]


# ---------------------------------------------------------------------------
# numba kernels
# ---------------------------------------------------------------------------

if numba is not None:

    @numba.njit(cache=True)
    def _affine_trilinear_numba(src, matrix, offset, out):
        sd, sh, sw = src.shape
        od, oh, ow = out.shape
        for i in range(od):
            for j in range(oh):
                for k in range(ow):
                    pd = matrix[0, 0] * i + matrix[0, 1] * j + matrix[0, 2] * k + offset[0]
                    ph = matrix[1, 0] * i + matrix[1, 1] * j + matrix[1, 2] * k + offset[1]
                    pw = matrix[2, 0] * i + matrix[2, 1] * j + matrix[2, 2] * k + offset[2]
                    if pd < 0.0:
                        pd = 0.0
                    elif pd > sd - 1.0:
                        pd = sd - 1.0
                    if ph < 0.0:
                        ph = 0.0
                    elif ph > sh - 1.0:
                        ph = sh - 1.0
                    if pw < 0.0:
                        pw = 0.0
                    elif pw > sw - 1.0:
                        pw = sw - 1.0
                    d0 = int(pd)
                    h0 = int(ph)
                    w0 = int(pw)
                    if sd > 1 and d0 > sd - 2:
                        d0 = sd - 2
                    if sh > 1 and h0 > sh - 2:
                        h0 = sh - 2
                    if sw > 1 and w0 > sw - 2:
                        w0 = sw - 2
                    d1 = min(d0 + 1, sd - 1)
                    h1 = min(h0 + 1, sh - 1)
                    w1 = min(w0 + 1, sw - 1)
                    fd = pd - d0
                    fh = ph - h0
                    fw = pw - w0
                    e00 = src[d0, h0, w0] * (1.0 - fw) + src[d0, h0, w1] * fw
                    e01 = src[d0, h1, w0] * (1.0 - fw) + src[d0, h1, w1] * fw
                    e10 = src[d1, h0, w0] * (1.0 - fw) + src[d1, h0, w1] * fw
                    e11 = src[d1, h1, w0] * (1.0 - fw) + src[d1, h1, w1] * fw
                    e0 = e00 * (1.0 - fh) + e01 * fh
                    e1 = e10 * (1.0 - fh) + e11 * fh
                    out[i, j, k] = e0 * (1.0 - fd) + e1 * fd

    @numba.njit(cache=True)
    def _affine_nearest_numba(src, matrix, offset, out):
        sd, sh, sw = src.shape
        od, oh, ow = out.shape
        for i in range(od):
            for j in range(oh):
                for k in range(ow):
                    pd = matrix[0, 0] * i + matrix[0, 1] * j + matrix[0, 2] * k + offset[0]
                    ph = matrix[1, 0] * i + matrix[1, 1] * j + matrix[1, 2] * k + offset[1]
                    pw = matrix[2, 0] * i + matrix[2, 1] * j + matrix[2, 2] * k + offset[2]
                    di = int(np.floor(pd + 0.5))
                    hi = int(np.floor(ph + 0.5))
                    wi = int(np.floor(pw + 0.5))
                    if di < 0:
                        di = 0
                    elif di > sd - 1:
                        di = sd - 1
                    if hi < 0:
                        hi = 0
                    elif hi > sh - 1:
                        hi = sh - 1
                    if wi < 0:
                        wi = 0
                    elif wi > sw - 1:
                        wi = sw - 1
                    out[i, j, k] = src[di, hi, wi]


# ---------------------------------------------------------------------------
# public entry points
# ---------------------------------------------------------------------------

def affine_sample_trilinear(src: np.ndarray, matrix, offset, out_shape) -> np.ndarray:
    """Trilinearly sample ``src`` at ``matrix @ o + offset`` for each output voxel.

    Returns float32 of shape ``out_shape``.
    """
    m = np.ascontiguousarray(matrix, dtype=np.float64)
    t = np.ascontiguousarray(offset, dtype=np.float64)
    if numba is not None:
        out = np.empty(tuple(out_shape), dtype=np.float64)
        _affine_trilinear_numba(np.ascontiguousarray(src, dtype=np.float64), m, t, out)
    else:
        out = _affine_trilinear_numpy(src, m, t, tuple(out_shape))
    return out.astype(np.float32)


def affine_sample_nearest(src: np.ndarray, matrix, offset, out_shape) -> np.ndarray:
    """Nearest-neighbour sample preserving the source dtype (labels stay integral)."""
    m = np.ascontiguousarray(matrix, dtype=np.float64)
    t = np.ascontiguousarray(offset, dtype=np.float64)
    src = np.ascontiguousarray(src)
    if numba is not None:
        out = np.empty(tuple(out_shape), dtype=src.dtype)
        _affine_nearest_numba(src, m, t, out)
        return out
    return _affine_nearest_numpy(src, m, t, tuple(out_shape)).astype(src.dtype)


def scale_sample_trilinear(src: np.ndarray, scale, out_shape) -> np.ndarray:
    """Axis-aligned rescale: output voxel ``i`` samples ``src`` at ``i * scale``."""
    m = np.diag(np.asarray(scale, dtype=np.float64))
    return affine_sample_trilinear(src, m, np.zeros(3), out_shape)


def scale_sample_nearest(src: np.ndarray, scale, out_shape) -> np.ndarray:
    m = np.diag(np.asarray(scale, dtype=np.float64))
    return affine_sample_nearest(src, m, np.zeros(3), out_shape)
