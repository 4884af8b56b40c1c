"""Hot numeric kernels.

Every kernel exists twice: a numba ``njit`` version (``nb_*``) and a pure
numpy version (``np_*``).  The public names bind to the numba versions unless
``EPKIT_DISABLE_JIT`` is set (see ``epkit._jit``).  Both versions implement
the same arithmetic and are cross-checked in the test-suite.

Branch conventions shared with ``epkit.model``:

* ``s = sqrt(Z**2 + 1)`` is the principal root.
* ``w_plus = -Z + s`` and ``w_minus = -Z - s`` are the affine coordinates of
  the eigen-lines ``chi = (1, w)``.  Since ``w_plus * w_minus = -1`` the
  smaller-modulus root is recomputed as ``-1/other`` to avoid cancellation.
"""

import numpy as np

from ._jit import HAS_NUMBA, JIT_ENABLED, njit

FLAG_REGULAR = 0
FLAG_EP = 1
FLAG_DIAGONAL = 2


# ---------------------------------------------------------------------------
# batched 2x2 eigen-decomposition
# ---------------------------------------------------------------------------

def np_eig2_batch(eps1, eps2, omega, ep_tol):
    eps1 = np.asarray(eps1, dtype=np.complex128)
    eps2 = np.asarray(eps2, dtype=np.complex128)
    omega = np.asarray(omega, dtype=np.complex128)
    e0 = 0.5 * (eps1 + eps2)
    diag = omega == 0
    safe_omega = np.where(diag, 1.0, omega)
    z = (eps1 - eps2) / (2.0 * safe_omega)
    disc = z * z + 1.0
    ep = (np.abs(disc) < ep_tol) & ~diag
    s = np.sqrt(disc)
    a = -z + s
    b = -z - s
    swap = np.abs(a) < np.abs(b)
    # a*b = -1 exactly; rebuild the small root from the large one
    with np.errstate(divide="ignore", invalid="ignore"):
        a = np.where(swap & (b != 0), -1.0 / b, a)
        b = np.where(~swap & (a != 0), -1.0 / a, b)
    e_plus = e0 + safe_omega * s
    e_minus = e0 - safe_omega * s

    e_plus = np.where(ep, e0, e_plus)
    e_minus = np.where(ep, e0, e_minus)
    a = np.where(ep, -z, a)
    b = np.where(ep, -z, b)

    e_plus = np.where(diag, eps1, e_plus)
    e_minus = np.where(diag, eps2, e_minus)
    a = np.where(diag, 0.0, a)
    b = np.where(diag, np.nan, b)

    flag = np.full(e0.shape, FLAG_REGULAR, dtype=np.int8)
    flag[ep] = FLAG_EP
    flag[diag] = FLAG_DIAGONAL
    return e_plus, e_minus, a, b, flag


@njit(cache=True, nogil=True)
def nb_eig2_batch(eps1, eps2, omega, ep_tol):
    n = eps1.shape[0]
    e_plus = np.empty(n, dtype=np.complex128)
    e_minus = np.empty(n, dtype=np.complex128)
    w_plus = np.empty(n, dtype=np.complex128)
    w_minus = np.empty(n, dtype=np.complex128)
    flag = np.zeros(n, dtype=np.int8)
    for k in range(n):
        e1 = eps1[k]
        e2 = eps2[k]
        om = omega[k]
        e0 = 0.5 * (e1 + e2)
        if om == 0:
            e_plus[k] = e1
            e_minus[k] = e2
            w_plus[k] = 0.0
            w_minus[k] = complex(np.nan, np.nan)
            flag[k] = FLAG_DIAGONAL
            continue
        z = (e1 - e2) / (2.0 * om)
        disc = z * z + 1.0
        if abs(disc) < ep_tol:
            e_plus[k] = e0
            e_minus[k] = e0
            w_plus[k] = -z
            w_minus[k] = -z
            flag[k] = FLAG_EP
            continue
        s = np.sqrt(disc)
        a = -z + s
        b = -z - s
        if abs(a) < abs(b):
            a = -1.0 / b
        else:
            b = -1.0 / a
        e_plus[k] = e0 + om * s
        e_minus[k] = e0 - om * s
        w_plus[k] = a
        w_minus[k] = b
    return e_plus, e_minus, w_plus, w_minus, flag


# ---------------------------------------------------------------------------
# phase rigidity of instantaneous normalized states
# ---------------------------------------------------------------------------

def np_rigidity_from_w(w):
    w = np.asarray(w, dtype=np.complex128)
    return np.abs(1.0 + w * w) / (1.0 + np.abs(w) ** 2)


@njit(cache=True, nogil=True)
def nb_rigidity_from_w(w):
    n = w.shape[0]
    out = np.empty(n, dtype=np.float64)
    for k in range(n):
        x = w[k]
        out[k] = abs(1.0 + x * x) / (1.0 + x.real * x.real + x.imag * x.imag)
    return out


def np_landscape(eps1, eps2, omega, ep_tol):
    e_plus, e_minus, wp, wm, flag = np_eig2_batch(eps1, eps2, omega, ep_tol)
    r_plus = np_rigidity_from_w(wp)
    r_minus = np_rigidity_from_w(np.where(flag == FLAG_DIAGONAL, 0.0, wm))
    r_plus[flag == FLAG_EP] = 0.0
    r_minus[flag == FLAG_EP] = 0.0
    return e_plus, e_minus, r_plus, r_minus, flag


@njit(cache=True, nogil=True)
def nb_landscape(eps1, eps2, omega, ep_tol):
    e_plus, e_minus, wp, wm, flag = nb_eig2_batch(eps1, eps2, omega, ep_tol)
    n = eps1.shape[0]
    r_plus = np.empty(n, dtype=np.float64)
    r_minus = np.empty(n, dtype=np.float64)
    for k in range(n):
        if flag[k] == FLAG_EP:
            r_plus[k] = 0.0
            r_minus[k] = 0.0
        elif flag[k] == FLAG_DIAGONAL:
            r_plus[k] = 1.0
            r_minus[k] = 1.0
        else:
            a = wp[k]
            b = wm[k]
            r_plus[k] = abs(1.0 + a * a) / (1.0 + a.real * a.real + a.imag * a.imag)
            r_minus[k] = abs(1.0 + b * b) / (1.0 + b.real * b.real + b.imag * b.imag)
    return e_plus, e_minus, r_plus, r_minus, flag


# ---------------------------------------------------------------------------
# sign continuation of a sampled square root
# ---------------------------------------------------------------------------

def np_continue_signs(values):
    """Signs ``sigma_k`` making ``sigma_k * values[k]`` as continuous as possible."""
    v = np.asarray(values, dtype=np.complex128)
    if v.size == 0:
        return np.empty(0, dtype=np.int8)
    flips = np.ones(v.size, dtype=np.int8)
    same = np.abs(v[1:] - v[:-1])
    opposite = np.abs(v[1:] + v[:-1])
    flips[1:] = np.where(opposite < same, -1, 1)
    return np.cumprod(flips).astype(np.int8)


@njit(cache=True, nogil=True)
def nb_continue_signs(values):
    n = values.shape[0]
    signs = np.ones(n, dtype=np.int8)
    for k in range(1, n):
        prev = signs[k - 1] * values[k - 1]
        if abs(values[k] + prev) < abs(values[k] - prev):
            signs[k] = -1
        else:
            signs[k] = 1
    return signs


def np_continue_affine(z, s):
    """Signs choosing ``w = -Z + sign*s`` closest to the previous choice."""
    z = np.asarray(z, dtype=np.complex128)
    s = np.asarray(s, dtype=np.complex128)
    signs = np.ones(z.size, dtype=np.int8)
    if z.size == 0:
        return signs
    plus = -z + s
    minus = -z - s
    prev = plus[0]
    for k in range(1, z.size):
        if abs(minus[k] - prev) < abs(plus[k] - prev):
            signs[k] = -1
            prev = minus[k]
        else:
            prev = plus[k]
    return signs


@njit(cache=True, nogil=True)
def nb_continue_affine(z, s):
    n = z.shape[0]
    signs = np.ones(n, dtype=np.int8)
    if n == 0:
        return signs
    prev = -z[0] + s[0]
    for k in range(1, n):
        a = -z[k] + s[k]
        b = -z[k] - s[k]
        if abs(b - prev) < abs(a - prev):
            signs[k] = -1
            prev = b
        else:
            prev = a
    return signs


# ---------------------------------------------------------------------------
# connection one-form along a sampled path in Z
# ---------------------------------------------------------------------------

def np_connection_integrand(z, s, dz):
    """``i w dw / (1 + w^2)`` for ``w = -Z + s`` and ``dw = (-1 + Z/s) dZ``."""
    z = np.asarray(z, dtype=np.complex128)
    s = np.asarray(s, dtype=np.complex128)
    w = -z + s
    dw = (-1.0 + z / s) * dz
    return 1j * w * dw / (1.0 + w * w)


@njit(cache=True, nogil=True)
def nb_connection_integrand(z, s, dz):
    n = z.shape[0]
    out = np.empty(n, dtype=np.complex128)
    for k in range(n):
        w = -z[k] + s[k]
        dw = (-1.0 + z[k] / s[k]) * dz[k]
        out[k] = 1j * w * dw / (1.0 + w * w)
    return out


# ---------------------------------------------------------------------------
# RK4 for i d/dt y = H(t) y with step-doubling error estimate
# ---------------------------------------------------------------------------

def _np_rk4_step(h0, hm, h1, y, dt):
    k1 = -1j * (h0 @ y)
    k2 = -1j * (hm @ (y + 0.5 * dt * k1))
    k3 = -1j * (hm @ (y + 0.5 * dt * k2))
    k4 = -1j * (h1 @ (y + dt * k3))
    return y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def np_rk4_doubling(hs, dt, y0):
    """Integrate over ``len(hs)`` steps of width ``dt``.

    ``hs[k]`` holds H at the five equispaced nodes of step ``k``.  Each step is
    taken once with width ``dt`` and once as two half-steps; the half-step
    result is kept and the largest discrepancy is returned as error estimate.
    """
    n = hs.shape[0]
    path = np.empty((n + 1, 2), dtype=np.complex128)
    path[0] = y0
    y = np.asarray(y0, dtype=np.complex128).copy()
    err = 0.0
    for k in range(n):
        h = hs[k]
        coarse = _np_rk4_step(h[0], h[2], h[4], y, dt)
        half = _np_rk4_step(h[0], h[1], h[2], y, 0.5 * dt)
        fine = _np_rk4_step(h[2], h[3], h[4], half, 0.5 * dt)
        scale = max(1.0, np.abs(fine).max())
        err = max(err, np.abs(fine - coarse).max() / scale)
        y = fine
        path[k + 1] = y
    return path, err


@njit(cache=True, nogil=True)
def _nb_apply(h, y):
    out = np.empty(2, dtype=np.complex128)
    out[0] = h[0, 0] * y[0] + h[0, 1] * y[1]
    out[1] = h[1, 0] * y[0] + h[1, 1] * y[1]
    return out


@njit(cache=True, nogil=True)
def _nb_rk4_step(h0, hm, h1, y, dt):
    k1 = -1j * _nb_apply(h0, y)
    k2 = -1j * _nb_apply(hm, y + 0.5 * dt * k1)
    k3 = -1j * _nb_apply(hm, y + 0.5 * dt * k2)
    k4 = -1j * _nb_apply(h1, y + dt * k3)
    return y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


@njit(cache=True, nogil=True)
def nb_rk4_doubling(hs, dt, y0):
    n = hs.shape[0]
    path = np.empty((n + 1, 2), dtype=np.complex128)
    path[0] = y0
    y = y0.copy()
    err = 0.0
    for k in range(n):
        coarse = _nb_rk4_step(hs[k, 0], hs[k, 2], hs[k, 4], y, dt)
        half = _nb_rk4_step(hs[k, 0], hs[k, 1], hs[k, 2], y, 0.5 * dt)
        fine = _nb_rk4_step(hs[k, 2], hs[k, 3], hs[k, 4], half, 0.5 * dt)
        scale = max(1.0, max(abs(fine[0]), abs(fine[1])))
        d = max(abs(fine[0] - coarse[0]), abs(fine[1] - coarse[1])) / scale
        if d > err:
            err = d
        y = fine
        path[k + 1] = y
    return path, err


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------

def _as_c128(x):
    return np.ascontiguousarray(np.atleast_1d(np.asarray(x, dtype=np.complex128)))


if JIT_ENABLED:

    def eig2_batch(eps1, eps2, omega, ep_tol):
        a, b, c = np.broadcast_arrays(_as_c128(eps1), _as_c128(eps2), _as_c128(omega))
        return nb_eig2_batch(_as_c128(a), _as_c128(b), _as_c128(c), float(ep_tol))

    def rigidity_from_w(w):
        return nb_rigidity_from_w(_as_c128(w))

    def landscape(eps1, eps2, omega, ep_tol):
        a, b, c = np.broadcast_arrays(_as_c128(eps1), _as_c128(eps2), _as_c128(omega))
        return nb_landscape(_as_c128(a), _as_c128(b), _as_c128(c), float(ep_tol))

    def continue_signs(values):
        return nb_continue_signs(_as_c128(values))

    def continue_affine(z, s):
        a, b = np.broadcast_arrays(_as_c128(z), _as_c128(s))
        return nb_continue_affine(_as_c128(a), _as_c128(b))

    def connection_integrand(z, s, dz):
        a, b, c = np.broadcast_arrays(_as_c128(z), _as_c128(s), _as_c128(dz))
        return nb_connection_integrand(_as_c128(a), _as_c128(b), _as_c128(c))

    def rk4_doubling(hs, dt, y0):
        return nb_rk4_doubling(
            np.ascontiguousarray(hs, dtype=np.complex128), float(dt), _as_c128(y0)
        )

else:
    eig2_batch = np_eig2_batch
    rigidity_from_w = np_rigidity_from_w
    landscape = np_landscape
    continue_signs = np_continue_signs
    continue_affine = np_continue_affine
    connection_integrand = np_connection_integrand
    rk4_doubling = np_rk4_doubling


def backend():
    """Name of the active kernel backend."""
    return "numba" if JIT_ENABLED else "numpy"


__all__ = [
    "FLAG_DIAGONAL",
    "FLAG_EP",
    "FLAG_REGULAR",
    "HAS_NUMBA",
    "JIT_ENABLED",
    "backend",
    "connection_integrand",
    "continue_affine",
    "continue_signs",
    "eig2_batch",
    "landscape",
    "rigidity_from_w",
    "rk4_doubling",
]
