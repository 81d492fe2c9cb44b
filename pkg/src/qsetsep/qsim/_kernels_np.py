"""Pure-numpy amplitude kernels (fallback backend).

Every function mutates ``amps`` in place. ``amps`` is a C-contiguous
complex128 vector of length 2**n; ``mask`` is a bool vector of the same
length. Semantics must stay in lockstep with the compiled backend in
``_kernels.pyx``.
"""

import math

import numpy as np

name = "numpy"

_SQRT_HALF = math.sqrt(0.5)


def phase_flip(amps, mask):
    amps[mask] *= -1.0


def invert_about_mean(amps):
    m2 = 2.0 * amps.mean()
    np.subtract(m2, amps, out=amps)


def grover_step(amps, mask):
    # Fused phase oracle + inversion about the mean.
    flipped = np.where(mask, -amps, amps)
    m2 = 2.0 * flipped.mean()
    np.subtract(m2, flipped, out=amps)


def marked_mass(amps, mask):
    sel = amps[mask]
    return float(np.real(sel * sel.conj()).sum())


def hadamard(amps, q):
    n = amps.size
    v = amps.reshape(n >> (q + 1), 2, 1 << q)
    a = v[:, 0].copy()
    b = v[:, 1]
    v[:, 0] = (a + b) * _SQRT_HALF
    v[:, 1] = (a - b) * _SQRT_HALF


def cphase(amps, q1, q2, angle):
    lo, hi = (q1, q2) if q1 < q2 else (q2, q1)
    n = amps.size
    v = amps.reshape(n >> (hi + 1), 2, 1 << (hi - lo - 1), 2, 1 << lo)
    v[:, 1, :, 1] *= complex(math.cos(angle), math.sin(angle))


def swap(amps, q1, q2):
    if q1 == q2:
        return
    lo, hi = (q1, q2) if q1 < q2 else (q2, q1)
    n = amps.size
    v = amps.reshape(n >> (hi + 1), 2, 1 << (hi - lo - 1), 2, 1 << lo)
    tmp = v[:, 0, :, 1].copy()
    v[:, 0, :, 1] = v[:, 1, :, 0]
    v[:, 1, :, 0] = tmp
