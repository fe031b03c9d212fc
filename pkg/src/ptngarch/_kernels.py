"""Compiled numerical kernels: RNG core, Poisson draws, panel simulation and
the intensity / derivative recursions.

Everything here is deliberately low-level (scalars, flat loops, explicit
uint64 state threading) so that numba can compile it to tight machine code
and results are bit-reproducible across platforms and thread counts.
"""

import math

import numpy as np
from numba import njit

U64 = np.uint64

# SplitMix64: counter-based 64-bit generator (increment by the golden-ratio
# constant, output a finalizer hash of the counter).
_GOLDEN = U64(0x9E3779B97F4A7C15)
_MIX1 = U64(0xBF58476D1CE4E5B9)
_MIX2 = U64(0x94D049BB133111EB)
_INV_2_53 = 1.0 / 9007199254740992.0  # 2**-53


@njit(cache=True, nogil=True)
def mix64(z):
    z = (z ^ (z >> U64(30))) * _MIX1
    z = (z ^ (z >> U64(27))) * _MIX2
    return z ^ (z >> U64(31))


@njit(cache=True, nogil=True)
def next_u64(state):
    state = state + _GOLDEN
    return mix64(state), state


@njit(cache=True, nogil=True)
def next_uniform(state):
    """Uniform double in [0, 1) from the top 53 bits of the next word."""
    u, state = next_u64(state)
    return (u >> U64(11)) * _INV_2_53, state


@njit(cache=True, nogil=True)
def poisson_inversion(lam, state):
    """Poisson draw by inversion (sequential search); exact, one uniform.

    Intended for lam < 10 where exp(-lam) is comfortably representable.
    """
    u, state = next_uniform(state)
    p = math.exp(-lam)
    s = p
    k = 0
    while u > s:
        k += 1
        p *= lam / k
        s += p
        if p < 1e-300 or k > 10000:
            break
    return k, state


@njit(cache=True, nogil=True)
def poisson_ptrs(lam, state):
    """Poisson draw via the transformed-rejection (PTRS) method.

    Exact for lam >= 10; uses two uniforms per trial with acceptance
    probability close to one.
    """
    slam = math.sqrt(lam)
    loglam = math.log(lam)
    b = 0.931 + 2.53 * slam
    a = -0.059 + 0.02483 * b
    invalpha = 1.1239 + 1.1328 / (b - 3.4)
    vr = 0.9277 - 3.6224 / (b - 2.0)
    while True:
        u, state = next_uniform(state)
        u -= 0.5
        v, state = next_uniform(state)
        us = 0.5 - abs(u)
        if us < 1e-15:
            continue
        k = int(math.floor((2.0 * a / us + b) * u + lam + 0.43))
        if us >= 0.07 and v <= vr:
            return k, state
        if k < 0 or (us < 0.013 and v > us):
            continue
        if (math.log(v) + math.log(invalpha) - math.log(a / (us * us) + b)
                <= k * loglam - lam - math.lgamma(k + 1.0)):
            return k, state


@njit(cache=True, nogil=True)
def poisson_draw(lam, state):
    if lam <= 0.0:
        return 0, state
    if lam < 10.0:
        return poisson_inversion(lam, state)
    return poisson_ptrs(lam, state)


@njit(cache=True, nogil=True)
def poisson_fill(lam, n, state):
    out = np.empty(n, np.int64)
    for i in range(n):
        k, state = poisson_draw(lam, state)
        out[i] = k
    return out, state


@njit(cache=True, nogil=True)
def simulate_kernel(omega, a1, a2, xi, beta, r, weights, t_total, lam_init,
                    cap, state):
    """Iterate the intensity recursion and draw counts.

    Returns (counts, intensities, err_node, err_time, state); err_node < 0
    means no explosion, otherwise the first (node, time) whose intensity
    exceeded ``cap``.
    """
    n = weights.shape[0]
    y = np.zeros((n, t_total), np.int64)
    lam = np.zeros((n, t_total), np.float64)
    for i in range(n):
        lam[i, 0] = lam_init[i]
        k, state = poisson_draw(lam_init[i], state)
        y[i, 0] = k
    for t in range(1, t_total):
        for i in range(n):
            yprev = y[i, t - 1]
            wsum = 0.0
            for j in range(n):
                wij = weights[i, j]
                if wij != 0.0:
                    wsum += wij * y[j, t - 1]
            if yprev >= r:
                lam_it = omega + a1 * yprev + xi * wsum + beta * lam[i, t - 1]
            else:
                lam_it = omega + a2 * yprev + xi * wsum + beta * lam[i, t - 1]
            if not (lam_it <= cap):
                return y, lam, i, t, state
            lam[i, t] = lam_it
            k, state = poisson_draw(lam_it, state)
            y[i, t] = k
    return y, lam, -1, -1, state


@njit(cache=True, nogil=True)
def filter_kernel(omega, a1, a2, xi, beta, y, x1, x2, z, lam0,
                  want_grad, want_hess):
    """Run the filtered-intensity recursion, optionally with derivatives.

    y, x1, x2, z are (N, T): counts, counts in the upper/lower regime, and
    the neighbour-average regressor.  Returns (lam, grads, mcols) where
    grads[i, t] is d(lam_it)/d(theta) and mcols[i, t] the beta-column of the
    (sparse) second-derivative matrix: only its beta row/column is nonzero.
    """
    n, t_len = y.shape
    lam = np.zeros((n, t_len))
    g = np.zeros((n, 5))
    m = np.zeros((n, 5))
    if want_grad:
        grads = np.zeros((n, t_len, 5))
    else:
        grads = np.zeros((0, 0, 5))
    if want_hess:
        mcols = np.zeros((n, t_len, 5))
    else:
        mcols = np.zeros((0, 0, 5))
    for i in range(n):
        lam[i, 0] = lam0[i]
    for t in range(1, t_len):
        for i in range(n):
            lp = lam[i, t - 1]
            h1 = x1[i, t - 1]
            h2 = x2[i, t - 1]
            h3 = z[i, t - 1]
            m0 = beta * m[i, 0] + g[i, 0]
            m1 = beta * m[i, 1] + g[i, 1]
            m2 = beta * m[i, 2] + g[i, 2]
            m3 = beta * m[i, 3] + g[i, 3]
            m4 = beta * m[i, 4] + 2.0 * g[i, 4]
            g0 = 1.0 + beta * g[i, 0]
            g1 = h1 + beta * g[i, 1]
            g2 = h2 + beta * g[i, 2]
            g3 = h3 + beta * g[i, 3]
            g4 = lp + beta * g[i, 4]
            lam[i, t] = omega + a1 * h1 + a2 * h2 + xi * h3 + beta * lp
            g[i, 0] = g0
            g[i, 1] = g1
            g[i, 2] = g2
            g[i, 3] = g3
            g[i, 4] = g4
            m[i, 0] = m0
            m[i, 1] = m1
            m[i, 2] = m2
            m[i, 3] = m3
            m[i, 4] = m4
            if want_grad:
                for k in range(5):
                    grads[i, t, k] = g[i, k]
            if want_hess:
                for k in range(5):
                    mcols[i, t, k] = m[i, k]
    return lam, grads, mcols


@njit(cache=True, nogil=True)
def acc_kernel(omega, a1, a2, xi, beta, y, x1, x2, z, lam0, order):
    """Single pass accumulating likelihood sums over t >= 1.

    order 0: log-likelihood sum only; 1: plus score; 2: plus the pieces of
    the Hessian (hvec) and the information outer products (gg, fi).

    Accumulation is Kahan-compensated, nodes innermost, so totals are
    reproducible and accurate regardless of panel size.
    """
    n, t_len = y.shape
    lam = lam0.copy()
    g = np.zeros((n, 5))
    m = np.zeros((n, 5))
    ll = 0.0
    ll_c = 0.0
    sc = np.zeros(5)
    sc_c = np.zeros(5)
    hv = np.zeros(5)
    hv_c = np.zeros(5)
    gg = np.zeros((5, 5))
    gg_c = np.zeros((5, 5))
    fi = np.zeros((5, 5))
    fi_c = np.zeros((5, 5))
    gn = np.empty(5)
    mn = np.empty(5)
    for t in range(1, t_len):
        for i in range(n):
            lp = lam[i]
            h1 = x1[i, t - 1]
            h2 = x2[i, t - 1]
            h3 = z[i, t - 1]
            lam_new = omega + a1 * h1 + a2 * h2 + xi * h3 + beta * lp
            yit = y[i, t]
            term = yit * math.log(lam_new) - lam_new
            u = term - ll_c
            v = ll + u
            ll_c = (v - ll) - u
            ll = v
            if order >= 1:
                w = yit / lam_new - 1.0
                if order >= 2:
                    for k in range(5):
                        mn[k] = beta * m[i, k] + g[i, k]
                    mn[4] += g[i, 4]
                gn[0] = 1.0 + beta * g[i, 0]
                gn[1] = h1 + beta * g[i, 1]
                gn[2] = h2 + beta * g[i, 2]
                gn[3] = h3 + beta * g[i, 3]
                gn[4] = lp + beta * g[i, 4]
                for k in range(5):
                    val = w * gn[k]
                    u = val - sc_c[k]
                    v = sc[k] + u
                    sc_c[k] = (v - sc[k]) - u
                    sc[k] = v
                if order >= 2:
                    wy2 = yit / (lam_new * lam_new)
                    il = 1.0 / lam_new
                    for k in range(5):
                        val = w * mn[k]
                        u = val - hv_c[k]
                        v = hv[k] + u
                        hv_c[k] = (v - hv[k]) - u
                        hv[k] = v
                    for k in range(5):
                        for l in range(k, 5):
                            prod = gn[k] * gn[l]
                            val = wy2 * prod
                            u = val - gg_c[k, l]
                            v = gg[k, l] + u
                            gg_c[k, l] = (v - gg[k, l]) - u
                            gg[k, l] = v
                            val = il * prod
                            u = val - fi_c[k, l]
                            v = fi[k, l] + u
                            fi_c[k, l] = (v - fi[k, l]) - u
                            fi[k, l] = v
                    for k in range(5):
                        m[i, k] = mn[k]
                for k in range(5):
                    g[i, k] = gn[k]
            lam[i] = lam_new
    # mirror the upper triangles
    for k in range(5):
        for l in range(k + 1, 5):
            gg[l, k] = gg[k, l]
            fi[l, k] = fi[k, l]
    return ll, sc, hv, gg, fi
