"""Adjoint-mode gradients for the quantum network.

One forward pass builds the final state; a reverse sweep then undoes the
ansatz layer by layer while accumulating, per rotation angle, the overlap
Im<bra|P|ket> that equals d<M>/d(angle).  The observable M is the
readout-weighted sum of per-qubit Z operators, so the full gradient of a
prediction costs a small constant times one simulation instead of one
simulation per parameter.

The three per-qubit dots are taken once per layer, before any undo, and
mapped to the (theta, phi, omega) derivatives through a per-qubit 3x3
recombination matrix: conjugating a Pauli by the not-yet-undone rotations
keeps it in the Pauli span, so the shifted-basis dots are linear in the
unshifted ones.  Entanglement blocks are pure basis permutations and are
applied through precomputed gather tables.

States are held as split re/im float64 arrays in per-thread scratch
buffers; samples of a batch run on a thread pool (results are merged in
sample order, so thread scheduling never changes the output).
"""

import math
import os
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .circuit import AnsatzConfig, ParameterVector, build_entanglement
from .kernels import impl as _k

_SQRT1_2 = 1.0 / math.sqrt(2.0)

_PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128)
_PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=np.complex128)

# gather tables per (topology, n_qubits): (forward, undo)
_perm_cache = {}
_tls = threading.local()


def _n_threads() -> int:
    env = os.environ.get("QFORECAST_THREADS", "")
    if env:
        return max(1, int(env))
    return max(1, os.cpu_count() or 1)


def _rx_mat(a):
    c, s = math.cos(a / 2), math.sin(a / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=np.complex128)


def _ry_mat(a):
    c, s = math.cos(a / 2), math.sin(a / 2)
    return np.array([[c, -s], [s, c]], dtype=np.complex128)


def _rz_mat(a):
    c, s = math.cos(a / 2), math.sin(a / 2)
    return np.array([[c - 1j * s, 0], [0, c + 1j * s]], dtype=np.complex128)


def _flat8(m) -> np.ndarray:
    return np.array(
        [
            m[0, 0].real, m[0, 0].imag, m[0, 1].real, m[0, 1].imag,
            m[1, 0].real, m[1, 0].imag, m[1, 1].real, m[1, 1].imag,
        ]
    )


def _pauli_coeffs(a) -> np.ndarray:
    """Real (x, y, z) coordinates of a traceless Hermitian 2x2 matrix."""
    return np.array(
        [
            np.trace(_PAULI_X @ a).real / 2.0,
            np.trace(_PAULI_Y @ a).real / 2.0,
            np.trace(np.diag([1.0, -1.0]) @ a).real / 2.0,
        ]
    )


def ent_tables(topology, n_qubits: int):
    """(forward, undo) int32 gather tables for one entanglement block.

    The block is a permutation pi of basis states; applying it forward is
    out[j] = in[pi^-1(j)], undoing it is out[j] = in[pi(j)].
    """
    key = (topology, n_qubits)
    cached = _perm_cache.get(key)
    if cached is not None:
        return cached
    dim = 1 << n_qubits
    y = np.arange(dim, dtype=np.int64)
    for g in build_entanglement(topology, n_qubits):
        y = y ^ (((y >> g.control) & 1) << g.target)
    perm = y.astype(np.int32)
    inv = np.empty(dim, dtype=np.int32)
    inv[perm] = np.arange(dim, dtype=np.int32)
    _perm_cache[key] = (inv, perm)
    return inv, perm


def feature_vectors(x) -> np.ndarray:
    """Per-qubit state after H then RY(x_q) on |0>: a real 2-vector each."""
    x = np.asarray(x, dtype=float)
    c = np.cos(x / 2.0)
    s = np.sin(x / 2.0)
    return np.stack([(c - s) * _SQRT1_2, (c + s) * _SQRT1_2], axis=1)


@dataclass
class EnginePlan:
    """Everything the per-sample engine needs for fixed (config, params)."""

    config: AnsatzConfig
    weights: np.ndarray
    bias: float
    fwd_mats: np.ndarray     # (L, n, 8)
    undo_mats: np.ndarray    # (L, n, 8)
    recomb: np.ndarray       # (L, n, 3, 3) rows = (theta, phi, omega)
    gather_fwd: np.ndarray
    gather_undo: np.ndarray


def prepare(config: AnsatzConfig, params: ParameterVector) -> EnginePlan:
    params.validate(config)
    n, L = config.n_qubits, config.n_layers
    angles = params.angles_view(config)
    fwd = np.empty((L, n, 8))
    undo = np.empty((L, n, 8))
    recomb = np.empty((L, n, 3, 3))
    for l in range(L):
        for q in range(n):
            theta, phi, omega = angles[l, q]
            mrx, mry, mrz = _rx_mat(theta), _ry_mat(phi), _rz_mat(omega)
            r = mrz @ mry @ mrx
            fwd[l, q] = _flat8(r)
            undo[l, q] = _flat8(r.conj().T)
            zy = mrz @ mry
            recomb[l, q, 0] = _pauli_coeffs(zy @ _PAULI_X @ zy.conj().T)
            recomb[l, q, 1] = _pauli_coeffs(mrz @ _PAULI_Y @ mrz.conj().T)
            recomb[l, q, 2] = (0.0, 0.0, 1.0)
    g_fwd, g_undo = ent_tables(config.topology, n)
    return EnginePlan(
        config=config,
        weights=params.readout_weights.astype(float).copy(),
        bias=float(params.readout_bias),
        fwd_mats=fwd,
        undo_mats=undo,
        recomb=recomb,
        gather_fwd=g_fwd,
        gather_undo=g_undo,
    )


def _buffers(dim: int):
    cache = getattr(_tls, "bufs", None)
    if cache is None:
        cache = {}
        _tls.bufs = cache
    bufs = cache.get(dim)
    if bufs is None:
        bufs = tuple(np.empty(dim) for _ in range(6))
        cache[dim] = bufs
    return bufs


def _forward(plan: EnginePlan, vecs):
    """Run feature map + ansatz; returns (kr, ki, spare_r, spare_i, br, bi)."""
    dim = 1 << plan.config.n_qubits
    kr, ki, br, bi, sr, si = _buffers(dim)
    _k.product_state(kr, ki, vecs)
    for l in range(plan.config.n_layers):
        _k.permute2(sr, si, kr, ki, plan.gather_fwd)
        kr, ki, sr, si = sr, si, kr, ki
        _k.rot_all(kr, ki, plan.fwd_mats[l])
    return kr, ki, sr, si, br, bi


def predict_sample(plan: EnginePlan, x):
    """(yhat, zvals) for one standardized feature vector."""
    n = plan.config.n_qubits
    kr, ki, _, _, _, _ = _forward(plan, feature_vectors(x))
    z = np.empty(n)
    _k.zexp_all(kr, ki, z)
    return float(plan.weights @ z + plan.bias), z


def gradient_sample(plan: EnginePlan, x, target: float):
    """(yhat, zvals, quantum loss-gradient) for one sample.

    The returned gradient is of |yhat - target| w.r.t. the 3nL rotation
    angles; the subgradient at yhat == target is zero.  Readout gradients
    follow analytically from zvals and are assembled by the caller.
    """
    cfg = plan.config
    n, L = cfg.n_qubits, cfg.n_layers
    kr, ki, sr, si, br, bi = _forward(plan, feature_vectors(x))
    z = np.empty(n)
    _k.zexp_all(kr, ki, z)
    yhat = float(plan.weights @ z + plan.bias)
    resid = yhat - target
    gq = np.zeros(3 * n * L)
    if resid == 0.0:
        return yhat, z, gq
    sign = 1.0 if resid > 0.0 else -1.0
    _k.bra_init(br, bi, kr, ki, plan.weights, sign)
    dots = np.empty((n, 3))
    for l in range(L - 1, -1, -1):
        _k.rev_stage(kr, ki, br, bi, plan.undo_mats[l], dots, l > 0)
        grads_l = np.einsum("qab,qb->qa", plan.recomb[l], dots)
        gq[l * n * 3 : (l + 1) * n * 3] = grads_l.reshape(-1)
        if l > 0:
            _k.permute2(sr, si, kr, ki, plan.gather_undo)
            kr, ki, sr, si = sr, si, kr, ki
            _k.permute2(sr, si, br, bi, plan.gather_undo)
            br, bi, sr, si = sr, si, br, bi
    return yhat, z, gq


def _use_threads(plan: EnginePlan, n_samples: int) -> bool:
    return plan.config.n_qubits >= 14 and n_samples > 1 and _n_threads() > 1


def batch_predict(plan: EnginePlan, xs) -> np.ndarray:
    """Predictions for a (S, n) matrix of standardized features."""
    xs = np.asarray(xs, dtype=float)
    if _use_threads(plan, xs.shape[0]):
        with ThreadPoolExecutor(max_workers=_n_threads()) as pool:
            preds = list(pool.map(lambda x: predict_sample(plan, x)[0], xs))
        return np.array(preds)
    return np.array([predict_sample(plan, x)[0] for x in xs])


def batch_gradient(plan: EnginePlan, xs, targets):
    """Mean-MAE loss gradient over a batch.

    Returns (preds, grad) where grad is the flat parameter layout
    [quantum..., readout_weights..., bias] of d mean|yhat - y| / d params.
    """
    xs = np.asarray(xs, dtype=float)
    targets = np.asarray(targets, dtype=float)
    S = xs.shape[0]
    cfg = plan.config
    n = cfg.n_qubits
    nq = 3 * n * cfg.n_layers

    def one(i):
        return gradient_sample(plan, xs[i], targets[i])

    if _use_threads(plan, S):
        with ThreadPoolExecutor(max_workers=_n_threads()) as pool:
            results = list(pool.map(one, range(S)))
    else:
        results = [one(i) for i in range(S)]

    preds = np.array([r[0] for r in results])
    zmat = np.stack([r[1] for r in results])
    gq = np.zeros(nq)
    for r in results:
        gq += r[2]
    signs = np.sign(preds - targets)
    grad = np.empty(nq + n + 1)
    grad[:nq] = gq / S
    grad[nq : nq + n] = (signs[:, None] * zmat).sum(axis=0) / S
    grad[-1] = signs.sum() / S
    return preds, grad
