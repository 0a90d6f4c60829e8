"""Independent reference computations used only by the tests.

Nothing here calls numpy.fft or the package's flow code: transforms are
explicit O(M^2) sums and matrix exponentials come from scipy's
scaling-and-squaring ``expm``.
"""
import numpy as np
from scipy.linalg import expm

S1 = np.array([[0, 1], [1, 0]], dtype=complex)
S3 = np.array([[1, 0], [0, -1]], dtype=complex)


def fft_order_modes(M):
    return np.array([l if l < M // 2 else l - M for l in range(M)])


def dft_matrix(M):
    """Row l (FFT order) gives c_l = (1/M) sum_j U_j exp(-2 i pi j l / M)."""
    l = fft_order_modes(M)[:, None]
    j = np.arange(M)[None, :]
    return np.exp(-2j * np.pi * j * l / M) / M


def idft_matrix(M):
    l = fft_order_modes(M)[None, :]
    j = np.arange(M)[:, None]
    return np.exp(2j * np.pi * j * l / M)


def naive_dft(values):
    return np.stack([dft_matrix(values.shape[1]) @ v for v in values])


def gamma(mu):
    return mu * S1 + S3


def free_block(mu_l, dt):
    """exp(dt T) on mode l, i.e. expm(-i dt Gamma_l)."""
    return expm(-1j * dt * gamma(mu_l))


def potential_block(V, A, eps, dt):
    """Eigen form P exp(-i eps dt Lambda) P^T, with P = I when A = 0."""
    lam = np.array([V + A, V - A])
    if A == 0:
        P = np.eye(2)
    else:
        P = np.array([[1, 1], [-1, 1]]) / np.sqrt(2)
    return P @ np.diag(np.exp(-1j * eps * dt * lam)) @ P.T


def _blocks_to_dense(blocks):
    """Per-index 2x2 blocks acting on [comp1 (M), comp2 (M)] vectors."""
    M = len(blocks)
    out = np.zeros((2 * M, 2 * M), dtype=complex)
    for k, B in enumerate(blocks):
        for a in range(2):
            for b in range(2):
                out[a * M + k, b * M + k] = B[a, b]
    return out


def dense_free(M, length, dt):
    mu = 2 * np.pi * fft_order_modes(M) / length
    Fw = np.kron(np.eye(2), dft_matrix(M))
    Bw = np.kron(np.eye(2), idft_matrix(M))
    return Bw @ _blocks_to_dense([free_block(m, dt) for m in mu]) @ Fw


def dense_potential(V, A, eps, dt):
    return _blocks_to_dense([potential_block(v, a, eps, dt) for v, a in zip(V, A)])


def dense_strang(M, length, V, A, eps, tau):
    half = dense_free(M, length, tau / 2)
    return half @ dense_potential(V, A, eps, tau) @ half


def apply_dense(mat, values):
    M = values.shape[1]
    out = mat @ values.reshape(2 * M)
    return out.reshape(2, M)
