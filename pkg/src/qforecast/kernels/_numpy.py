"""Pure-numpy kernels: reference implementations of the hot paths.

Two families live here.  The simulator kernels act in place on a dense
complex128 amplitude vector (qubit 0 is the least-significant bit of the
basis index).  The gradient-engine kernels act on split real/imaginary
float64 arrays, which is what the adjoint sweep uses.

Shapes and semantics must stay in lockstep with ``_numba``; the test
suite cross-checks the two backends against each other.
"""

import numpy as np

# ---------------------------------------------------------------------------
# complex128 simulator kernels


def apply_1q(amps, q, u00, u01, u10, u11):
    """Apply a single-qubit unitary [[u00,u01],[u10,u11]] to qubit q, in place."""
    step = 1 << q
    view = amps.reshape(-1, 2, step)
    a = view[:, 0, :].copy()
    b = view[:, 1, :]
    view[:, 0, :] = u00 * a + u01 * b
    view[:, 1, :] = u10 * a + u11 * b


def apply_cnot(amps, control, target):
    """Flip qubit `target` where qubit `control` is set, in place."""
    idx = np.arange(amps.shape[0])
    src = ((idx >> control) & 1) == 1
    amps[src] = amps[src ^ (1 << target)]


def expval_z_c(amps, q):
    """<Z_q> of the state: +1 weight where bit q is 0, -1 where it is 1."""
    step = 1 << q
    p = (amps.real * amps.real + amps.imag * amps.imag).reshape(-1, 2, step)
    return float(p[:, 0, :].sum() - p[:, 1, :].sum())


# ---------------------------------------------------------------------------
# split re/im gradient-engine kernels


def product_state(kr, ki, vecs):
    """Fill (kr, ki) with the real product state  ⊗_q (vecs[q,0]|0> + vecs[q,1]|1>).

    Built by doubling the populated prefix once per qubit.
    """
    n = vecs.shape[0]
    kr[0] = 1.0
    ki[: 1 << n] = 0.0
    size = 1
    for q in range(n):
        kr[size : 2 * size] = kr[:size] * vecs[q, 1]
        kr[:size] *= vecs[q, 0]
        size *= 2


def rot_all(kr, ki, mats):
    """Apply one 2x2 complex matrix per qubit (mats[q] = 8 real coefficients)."""
    n = mats.shape[0]
    for q in range(n):
        m = mats[q]
        step = 1 << q
        vr = kr.reshape(-1, 2, step)
        vi = ki.reshape(-1, 2, step)
        ar = vr[:, 0, :].copy()
        ai = vi[:, 0, :].copy()
        cr = vr[:, 1, :].copy()
        ci = vi[:, 1, :].copy()
        vr[:, 0, :] = m[0] * ar - m[1] * ai + m[2] * cr - m[3] * ci
        vi[:, 0, :] = m[0] * ai + m[1] * ar + m[2] * ci + m[3] * cr
        vr[:, 1, :] = m[4] * ar - m[5] * ai + m[6] * cr - m[7] * ci
        vi[:, 1, :] = m[4] * ai + m[5] * ar + m[6] * ci + m[7] * cr


def rev_stage(kr, ki, br, bi, undo_mats, dots, do_undo):
    """Per qubit: accumulate Im<bra|P|ket> for P = X,Y,Z, then optionally
    apply undo_mats[q] to both ket and bra.

    dots has shape (n, 3) ordered [X, Y, Z]; entries are overwritten.
    """
    n = undo_mats.shape[0]
    for q in range(n):
        step = 1 << q
        k0r = kr.reshape(-1, 2, step)[:, 0, :]
        k0i = ki.reshape(-1, 2, step)[:, 0, :]
        k1r = kr.reshape(-1, 2, step)[:, 1, :]
        k1i = ki.reshape(-1, 2, step)[:, 1, :]
        b0r = br.reshape(-1, 2, step)[:, 0, :]
        b0i = bi.reshape(-1, 2, step)[:, 0, :]
        b1r = br.reshape(-1, 2, step)[:, 1, :]
        b1i = bi.reshape(-1, 2, step)[:, 1, :]
        # Im<b|Z|k> = Im(conj(b0) k0) - Im(conj(b1) k1)
        dots[q, 2] = (b0r * k0i - b0i * k0r).sum() - (b1r * k1i - b1i * k1r).sum()
        # Im<b|Y|k> = Re(conj(b1) k0) - Re(conj(b0) k1)
        dots[q, 1] = (b1r * k0r + b1i * k0i).sum() - (b0r * k1r + b0i * k1i).sum()
        # Im<b|X|k> = Im(conj(b0) k1) + Im(conj(b1) k0)
        dots[q, 0] = (b0r * k1i - b0i * k1r).sum() + (b1r * k0i - b1i * k0r).sum()
    if do_undo:
        rot_all(kr, ki, undo_mats)
        rot_all(br, bi, undo_mats)


def permute2(dr, di, sr, si, idx):
    """dr/di <- sr/si gathered through the index table idx."""
    np.take(sr, idx, out=dr)
    np.take(si, idx, out=di)


def zexp_all(kr, ki, out):
    """<Z_q> for every qubit of the state (kr, ki), written into out."""
    n = out.shape[0]
    p = kr * kr + ki * ki
    total = p.sum()
    for q in range(n):
        p1 = p.reshape(-1, 2, 1 << q)[:, 1, :].sum()
        out[q] = total - 2.0 * p1


def bra_init(br, bi, kr, ki, weights, scale):
    """bra <- scale * diag(sum_q w_q Z_q) * ket."""
    n = weights.shape[0]
    dim = kr.shape[0]
    diag = np.zeros(dim)
    idx = np.arange(dim)
    for q in range(n):
        sign = 1.0 - 2.0 * ((idx >> q) & 1)
        diag += weights[q] * sign
    diag *= scale
    np.multiply(kr, diag, out=br)
    np.multiply(ki, diag, out=bi)
