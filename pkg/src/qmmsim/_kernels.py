"""Compiled inner loops (numba).

Only the Bloch RK4 stepper lives here: sequential microsecond-scale steps
dominate the long runs and are far too slow as per-step numpy calls.
Field updates are whole-array numpy operations and stay in fields.py.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def bloch_rk4(sx, sy, sz, omega, drive, gamma, dt, n_steps, record_every, out):
    """In-place RK4 of the two-level equations of motion, per site:

        sx' = -omega*sy            - gamma*sx
        sy' =  omega*sx + c*sz     - gamma*sy
        sz' =           - c*sy

    with c = drive[i] = 2*d0*E held constant over the call.  If
    record_every > 0, snapshots (including the initial state) are written
    into out[(n_rec, 3, n)].
    """
    n = sx.shape[0]
    idx = 0
    if record_every > 0:
        for i in range(n):
            out[0, 0, i] = sx[i]
            out[0, 1, i] = sy[i]
            out[0, 2, i] = sz[i]
        idx = 1
    for step in range(n_steps):
        for i in range(n):
            w = omega[i]
            c = drive[i]
            x0 = sx[i]
            y0 = sy[i]
            z0 = sz[i]

            kx1 = -w * y0 - gamma * x0
            ky1 = w * x0 + c * z0 - gamma * y0
            kz1 = -c * y0

            x = x0 + 0.5 * dt * kx1
            y = y0 + 0.5 * dt * ky1
            z = z0 + 0.5 * dt * kz1
            kx2 = -w * y - gamma * x
            ky2 = w * x + c * z - gamma * y
            kz2 = -c * y

            x = x0 + 0.5 * dt * kx2
            y = y0 + 0.5 * dt * ky2
            z = z0 + 0.5 * dt * kz2
            kx3 = -w * y - gamma * x
            ky3 = w * x + c * z - gamma * y
            kz3 = -c * y

            x = x0 + dt * kx3
            y = y0 + dt * ky3
            z = z0 + dt * kz3
            kx4 = -w * y - gamma * x
            ky4 = w * x + c * z - gamma * y
            kz4 = -c * y

            sx[i] = x0 + dt / 6.0 * (kx1 + 2.0 * kx2 + 2.0 * kx3 + kx4)
            sy[i] = y0 + dt / 6.0 * (ky1 + 2.0 * ky2 + 2.0 * ky3 + ky4)
            sz[i] = z0 + dt / 6.0 * (kz1 + 2.0 * kz2 + 2.0 * kz3 + kz4)
        if record_every > 0 and (step + 1) % record_every == 0:
            for i in range(n):
                out[idx, 0, i] = sx[i]
                out[idx, 1, i] = sy[i]
                out[idx, 2, i] = sz[i]
            idx += 1
    return idx


def empty_record(n_steps, record_every, n_sites):
    """Allocate the snapshot buffer bloch_rk4 expects."""
    if record_every <= 0:
        return np.empty((0, 3, n_sites))
    n_rec = 1 + n_steps // record_every
    return np.empty((n_rec, 3, n_sites))
