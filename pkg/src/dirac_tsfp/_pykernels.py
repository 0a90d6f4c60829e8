"""Pure numpy implementation of the splitting hot loop.

Used when the compiled extension is unavailable, and as the baseline the
compiled kernel is tested and benchmarked against.
"""
import numpy as np

FREE = 0
POTENTIAL = 1


def run_stages(u, kinds, tables, n_steps):
    """Apply ``n_steps`` repetitions of a stage sequence to ``u``.

    Every stage multiplies by a symmetric 2x2 matrix ``[[t0, t1], [t1, t2]]``
    stored as ``tables[s] = (t0, t1, t2)``: per Fourier coefficient for
    ``FREE`` stages (FFT order, forward transform scaled by 1/M) and per node
    for ``POTENTIAL`` stages. Input is not modified; the result is returned
    in physical space.
    """
    M = u.shape[1]
    v = np.array(u, dtype=np.complex128, copy=True)
    stages = [(int(k), tables[s, 0], tables[s, 1], tables[s, 2]) for s, k in enumerate(kinds)]
    for _ in range(int(n_steps)):
        spectral = False
        for kind, t0, t1, t2 in stages:
            if kind == FREE and not spectral:
                v = np.fft.fft(v, axis=1) / M
                spectral = True
            elif kind == POTENTIAL and spectral:
                v = np.fft.ifft(v, axis=1) * M
                spectral = False
            v = np.stack([t0 * v[0] + t1 * v[1], t1 * v[0] + t2 * v[1]])
        if spectral:
            v = np.fft.ifft(v, axis=1) * M
    return v
