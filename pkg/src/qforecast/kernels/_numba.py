"""Numba kernels: @njit twins of ``_numpy`` with cache-aware tiling.

The adjoint sweep is memory-bound when every qubit gets its own pass over
the state, so the engine kernels visit the state in L2-sized tiles and
process every qubit of a rotation stage per visit: qubits below LOW_K act
inside a contiguous tile, higher qubits pair row blocks that share the
same low-index range.  Inner loops are written over contiguous slices,
which is what LLVM vectorizes reliably here.
"""

import numpy as np
from numba import njit

# 2^LOW_K complex amplitudes per tile; 4 float64 arrays per tile stay L2-resident
LOW_K = 12
_MIN_ROW = 64

# ---------------------------------------------------------------------------
# complex128 simulator kernels


@njit(cache=True, fastmath=True)
def apply_1q(amps, q, u00, u01, u10, u11):
    step = 1 << q
    dim = amps.shape[0]
    for base in range(0, dim, step << 1):
        for i in range(base, base + step):
            j = i + step
            a = amps[i]
            b = amps[j]
            amps[i] = u00 * a + u01 * b
            amps[j] = u10 * a + u11 * b


@njit(cache=True, fastmath=True)
def apply_cnot(amps, control, target):
    cbit = 1 << control
    tbit = 1 << target
    dim = amps.shape[0]
    for i in range(dim):
        if (i & cbit) != 0 and (i & tbit) == 0:
            j = i | tbit
            tmp = amps[i]
            amps[i] = amps[j]
            amps[j] = tmp


@njit(cache=True, fastmath=True)
def expval_z_c(amps, q):
    step = 1 << q
    dim = amps.shape[0]
    acc = 0.0
    for base in range(0, dim, step << 1):
        for i in range(base, base + step):
            j = i + step
            a = amps[i]
            b = amps[j]
            acc += (a.real * a.real + a.imag * a.imag) - (b.real * b.real + b.imag * b.imag)
    return acc


# ---------------------------------------------------------------------------
# split re/im gradient-engine kernels


@njit(cache=True, fastmath=True)
def product_state(kr, ki, vecs):
    n = vecs.shape[0]
    dim = 1 << n
    for i in range(dim):
        ki[i] = 0.0
    kr[0] = 1.0
    size = 1
    for q in range(n):
        v0 = vecs[q, 0]
        v1 = vecs[q, 1]
        for i in range(size):
            kr[size + i] = kr[i] * v1
            kr[i] = kr[i] * v0
        size *= 2


@njit(cache=True, fastmath=True)
def _rot_span(xr, xi, start, count, step, m):
    m00r = m[0]; m00i = m[1]; m01r = m[2]; m01i = m[3]
    m10r = m[4]; m10i = m[5]; m11r = m[6]; m11i = m[7]
    for base in range(start, start + count, step << 1):
        x0r = xr[base:base + step]
        x0i = xi[base:base + step]
        x1r = xr[base + step:base + 2 * step]
        x1i = xi[base + step:base + 2 * step]
        for i in range(step):
            ar = x0r[i]; ai = x0i[i]
            cr = x1r[i]; ci = x1i[i]
            x0r[i] = m00r * ar - m00i * ai + m01r * cr - m01i * ci
            x0i[i] = m00r * ai + m00i * ar + m01r * ci + m01i * cr
            x1r[i] = m10r * ar - m10i * ai + m11r * cr - m11i * ci
            x1i[i] = m10r * ai + m10i * ar + m11r * ci + m11i * cr


@njit(cache=True, fastmath=True)
def _rot_rows(xr, xi, lowbase, ncols, klow, qq, nrows, m):
    m00r = m[0]; m00i = m[1]; m01r = m[2]; m01i = m[3]
    m10r = m[4]; m10i = m[5]; m11r = m[6]; m11i = m[7]
    step = 1 << qq
    for sub in range(0, nrows, step << 1):
        for row in range(sub, sub + step):
            o0 = (row << klow) + lowbase
            o1 = ((row + step) << klow) + lowbase
            x0r = xr[o0:o0 + ncols]
            x0i = xi[o0:o0 + ncols]
            x1r = xr[o1:o1 + ncols]
            x1i = xi[o1:o1 + ncols]
            for i in range(ncols):
                ar = x0r[i]; ai = x0i[i]
                cr = x1r[i]; ci = x1i[i]
                x0r[i] = m00r * ar - m00i * ai + m01r * cr - m01i * ci
                x0i[i] = m00r * ai + m00i * ar + m01r * ci + m01i * cr
                x1r[i] = m10r * ar - m10i * ai + m11r * cr - m11i * ci
                x1i[i] = m10r * ai + m10i * ar + m11r * ci + m11i * cr


@njit(cache=True, fastmath=True)
def _dots_span(kr, ki, br, bi, start, count, step):
    sx = 0.0
    sy = 0.0
    sz = 0.0
    for base in range(start, start + count, step << 1):
        k0r = kr[base:base + step]
        k0i = ki[base:base + step]
        k1r = kr[base + step:base + 2 * step]
        k1i = ki[base + step:base + 2 * step]
        b0r = br[base:base + step]
        b0i = bi[base:base + step]
        b1r = br[base + step:base + 2 * step]
        b1i = bi[base + step:base + 2 * step]
        for i in range(step):
            ar = k0r[i]; ai = k0i[i]; brr = b0r[i]; bri = b0i[i]
            cr = k1r[i]; ci = k1i[i]; drr = b1r[i]; dri = b1i[i]
            sz += (brr * ai - bri * ar) - (drr * ci - dri * cr)
            sy += (drr * ar + dri * ai) - (brr * cr + bri * ci)
            sx += (brr * ci - bri * cr) + (drr * ai - dri * ar)
    return sx, sy, sz


@njit(cache=True, fastmath=True)
def _dots_rows(kr, ki, br, bi, lowbase, ncols, klow, qq, nrows):
    step = 1 << qq
    sx = 0.0
    sy = 0.0
    sz = 0.0
    for sub in range(0, nrows, step << 1):
        for row in range(sub, sub + step):
            o0 = (row << klow) + lowbase
            o1 = ((row + step) << klow) + lowbase
            k0r = kr[o0:o0 + ncols]
            k0i = ki[o0:o0 + ncols]
            k1r = kr[o1:o1 + ncols]
            k1i = ki[o1:o1 + ncols]
            b0r = br[o0:o0 + ncols]
            b0i = bi[o0:o0 + ncols]
            b1r = br[o1:o1 + ncols]
            b1i = bi[o1:o1 + ncols]
            for i in range(ncols):
                ar = k0r[i]; ai = k0i[i]; brr = b0r[i]; bri = b0i[i]
                cr = k1r[i]; ci = k1i[i]; drr = b1r[i]; dri = b1i[i]
                sz += (brr * ai - bri * ar) - (drr * ci - dri * cr)
                sy += (drr * ar + dri * ai) - (brr * cr + bri * ci)
                sx += (brr * ci - bri * cr) + (drr * ai - dri * ar)
    return sx, sy, sz


@njit(cache=True, fastmath=True)
def rot_all(kr, ki, mats):
    n = mats.shape[0]
    dim = kr.shape[0]
    klow = n if n <= LOW_K else LOW_K
    tile = 1 << klow
    for base in range(0, dim, tile):
        for q in range(klow):
            _rot_span(kr, ki, base, tile, 1 << q, mats[q])
    if n > klow:
        g = n - klow
        nrows = 1 << g
        ncols = tile >> g
        if ncols < _MIN_ROW:
            ncols = _MIN_ROW
        for lowbase in range(0, tile, ncols):
            for qq in range(g):
                _rot_rows(kr, ki, lowbase, ncols, klow, qq, nrows, mats[klow + qq])


@njit(cache=True, fastmath=True)
def rev_stage(kr, ki, br, bi, undo_mats, dots, do_undo):
    n = undo_mats.shape[0]
    dim = kr.shape[0]
    klow = n if n <= LOW_K else LOW_K
    tile = 1 << klow
    for q in range(n):
        dots[q, 0] = 0.0
        dots[q, 1] = 0.0
        dots[q, 2] = 0.0
    for base in range(0, dim, tile):
        for q in range(klow):
            sx, sy, sz = _dots_span(kr, ki, br, bi, base, tile, 1 << q)
            dots[q, 0] += sx
            dots[q, 1] += sy
            dots[q, 2] += sz
        if do_undo:
            for q in range(klow):
                _rot_span(kr, ki, base, tile, 1 << q, undo_mats[q])
                _rot_span(br, bi, base, tile, 1 << q, undo_mats[q])
    if n > klow:
        g = n - klow
        nrows = 1 << g
        ncols = tile >> g
        if ncols < _MIN_ROW:
            ncols = _MIN_ROW
        for lowbase in range(0, tile, ncols):
            for qq in range(g):
                sx, sy, sz = _dots_rows(kr, ki, br, bi, lowbase, ncols, klow, qq, nrows)
                dots[klow + qq, 0] += sx
                dots[klow + qq, 1] += sy
                dots[klow + qq, 2] += sz
            if do_undo:
                for qq in range(g):
                    _rot_rows(kr, ki, lowbase, ncols, klow, qq, nrows, undo_mats[klow + qq])
                    _rot_rows(br, bi, lowbase, ncols, klow, qq, nrows, undo_mats[klow + qq])


@njit(cache=True, fastmath=True)
def permute2(dr, di, sr, si, idx):
    for j in range(dr.shape[0]):
        k = idx[j]
        dr[j] = sr[k]
        di[j] = si[k]


@njit(cache=True, fastmath=True)
def zexp_all(kr, ki, out):
    n = out.shape[0]
    dim = kr.shape[0]
    klow = n if n <= LOW_K else LOW_K
    tile = 1 << klow
    p1 = np.zeros(n)
    pbuf = np.empty(tile)
    grand = 0.0
    for base in range(0, dim, tile):
        tot = 0.0
        for t in range(tile):
            v = kr[base + t] * kr[base + t] + ki[base + t] * ki[base + t]
            pbuf[t] = v
            tot += v
        grand += tot
        for q in range(klow):
            step = 1 << q
            s = 0.0
            for sub in range(0, tile, step << 1):
                for i in range(sub + step, sub + 2 * step):
                    s += pbuf[i]
            p1[q] += s
        hb = base >> klow
        for qq in range(n - klow):
            if (hb >> qq) & 1:
                p1[klow + qq] += tot
    for q in range(n):
        out[q] = grand - 2.0 * p1[q]


@njit(cache=True, fastmath=True)
def bra_init(br, bi, kr, ki, weights, scale):
    n = weights.shape[0]
    dim = kr.shape[0]
    klow = n if n <= LOW_K else LOW_K
    tile = 1 << klow
    lowtab = np.empty(tile)
    for t in range(tile):
        s = 0.0
        for q in range(klow):
            if (t >> q) & 1:
                s -= weights[q]
            else:
                s += weights[q]
        lowtab[t] = s
    for base in range(0, dim, tile):
        hb = base >> klow
        hs = 0.0
        for qq in range(n - klow):
            if (hb >> qq) & 1:
                hs -= weights[klow + qq]
            else:
                hs += weights[klow + qq]
        for t in range(tile):
            d = (lowtab[t] + hs) * scale
            br[base + t] = kr[base + t] * d
            bi[base + t] = ki[base + t] * d
