"""Numba kernels for the flat-program statevector pipeline.

States are planar float64 arrays of shape (planes, 2**n): one plane for a
purely real state, two planes (real, imaginary) for a complex one.  Real
rotations (RY) and sign/permutation ops act plane by plane, which keeps the
inner loops in plain float arithmetic; RX and RZ mix the two planes and are
only emitted on the two-plane path.

A circuit compiles to five parallel arrays (kinds, qubits, auxes, slots) plus
a bank of precomputed +-1 sign vectors: OP_DIAG applies one such vector (a
run of consecutive CZ/Z gates fused into a single pass).

Hamiltonians arrive flip-mask factored: for every bit mask m appearing in the
operator, the matrix element H[r, r ^ m] depends only on r, so a matvec is
one multiply-gather pass per mask over contiguous value rows.
"""
import numpy as np
from numba import njit

OP_RX = 0
OP_RY = 1
OP_RZ = 2
OP_CZ = 3
OP_X = 4
OP_Z = 5
OP_DIAG = 6


@njit(cache=True, fastmath=True)
def run_program(x, kinds, qubits, auxes, slots, params, diags, start, end):
    """Apply ops [start, end) in place to the planar state x (planes, dim)."""
    planes = x.shape[0]
    dim = x.shape[1]
    for k in range(start, end):
        kind = kinds[k]
        step = 1 << qubits[k]
        if kind == OP_RY:
            half = 0.5 * params[slots[k]]
            c = np.cos(half)
            s = np.sin(half)
            for p in range(planes):
                xp = x[p]
                if step == 1:
                    for i in range(0, dim, 2):
                        a0 = xp[i]
                        a1 = xp[i + 1]
                        xp[i] = c * a0 - s * a1
                        xp[i + 1] = s * a0 + c * a1
                else:
                    for base in range(0, dim, 2 * step):
                        for i in range(base, base + step):
                            a0 = xp[i]
                            a1 = xp[i + step]
                            xp[i] = c * a0 - s * a1
                            xp[i + step] = s * a0 + c * a1
        elif kind == OP_RZ:
            # diag(exp(-i h), exp(+i h)) with h = theta/2; mixes the planes
            half = 0.5 * params[slots[k]]
            c = np.cos(half)
            s = np.sin(half)
            xr = x[0]
            xi = x[1]
            if step == 1:
                for i in range(0, dim, 2):
                    r0 = xr[i]
                    m0 = xi[i]
                    xr[i] = c * r0 + s * m0
                    xi[i] = c * m0 - s * r0
                    r1 = xr[i + 1]
                    m1 = xi[i + 1]
                    xr[i + 1] = c * r1 - s * m1
                    xi[i + 1] = c * m1 + s * r1
            else:
                for base in range(0, dim, 2 * step):
                    for i in range(base, base + step):
                        j = i + step
                        r0 = xr[i]
                        m0 = xi[i]
                        xr[i] = c * r0 + s * m0
                        xi[i] = c * m0 - s * r0
                        r1 = xr[j]
                        m1 = xi[j]
                        xr[j] = c * r1 - s * m1
                        xi[j] = c * m1 + s * r1
        elif kind == OP_RX:
            half = 0.5 * params[slots[k]]
            c = np.cos(half)
            s = np.sin(half)
            xr = x[0]
            xi = x[1]
            if step == 1:
                for i in range(0, dim, 2):
                    r0 = xr[i]
                    m0 = xi[i]
                    r1 = xr[i + 1]
                    m1 = xi[i + 1]
                    xr[i] = c * r0 + s * m1
                    xi[i] = c * m0 - s * r1
                    xr[i + 1] = c * r1 + s * m0
                    xi[i + 1] = c * m1 - s * r0
            else:
                for base in range(0, dim, 2 * step):
                    for i in range(base, base + step):
                        j = i + step
                        r0 = xr[i]
                        m0 = xi[i]
                        r1 = xr[j]
                        m1 = xi[j]
                        xr[i] = c * r0 + s * m1
                        xi[i] = c * m0 - s * r1
                        xr[j] = c * r1 + s * m0
                        xi[j] = c * m1 - s * r0
        elif kind == OP_X:
            for p in range(planes):
                xp = x[p]
                for base in range(0, dim, 2 * step):
                    for i in range(base, base + step):
                        a0 = xp[i]
                        xp[i] = xp[i + step]
                        xp[i + step] = a0
        elif kind == OP_Z:
            for p in range(planes):
                xp = x[p]
                for base in range(step, dim, 2 * step):
                    for i in range(base, base + step):
                        xp[i] = -xp[i]
        elif kind == OP_CZ:
            m = (1 << qubits[k]) | (1 << auxes[k])
            for p in range(planes):
                xp = x[p]
                for i in range(dim):
                    if i & m == m:
                        xp[i] = -xp[i]
        else:  # OP_DIAG
            row = diags[auxes[k]]
            for p in range(planes):
                xp = x[p]
                for i in range(dim):
                    xp[i] *= row[i]


@njit(cache=True, fastmath=True)
def apply_masks(values, masks, x, y):
    """y = H x for a real flip-mask operator; returns (<H>, <H^2>).

    The xor-indexed gather vectorizes as-is and the state fits in L1 at the
    sizes we run, so the straightforward loop is also the fastest one.
    """
    planes = x.shape[0]
    dim = x.shape[1]
    for p in range(planes):
        xp = x[p]
        yp = y[p]
        for r in range(dim):
            yp[r] = 0.0
        for k in range(masks.shape[0]):
            m = masks[k]
            vk = values[k]
            for r in range(dim):
                yp[r] += vk[r] * xp[r ^ m]
    h = 0.0
    h2 = 0.0
    for p in range(planes):
        xp = x[p]
        yp = y[p]
        for r in range(dim):
            h += xp[r] * yp[r]
            h2 += yp[r] * yp[r]
    return h, h2


@njit(cache=True, fastmath=True)
def apply_masks_c(values_re, values_im, masks, x, y):
    """Same as apply_masks for complex-entry operators (two-plane state)."""
    dim = x.shape[1]
    xr = x[0]
    xi = x[1]
    yr = y[0]
    yi = y[1]
    for r in range(dim):
        yr[r] = 0.0
        yi[r] = 0.0
    for k in range(masks.shape[0]):
        m = masks[k]
        vr = values_re[k]
        vi = values_im[k]
        for r in range(dim):
            a = xr[r ^ m]
            b = xi[r ^ m]
            yr[r] += vr[r] * a - vi[r] * b
            yi[r] += vr[r] * b + vi[r] * a
    h = 0.0
    h2 = 0.0
    for r in range(dim):
        h += xr[r] * yr[r] + xi[r] * yi[r]
        h2 += yr[r] * yr[r] + yi[r] * yi[r]
    return h, h2


@njit(cache=True, fastmath=True)
def diag_moments(x, d):
    """(<D>, <D^2>) for a diagonal observable d over the planar state x."""
    planes = x.shape[0]
    dim = x.shape[1]
    s1 = 0.0
    s2 = 0.0
    for p in range(planes):
        xp = x[p]
        for r in range(dim):
            w = xp[r] * xp[r]
            s1 += d[r] * w
            s2 += d[r] * d[r] * w
    return s1, s2


@njit(cache=True, fastmath=True)
def overlap(t, x):
    """<t|x> as (re, im); t is two-plane, x may be one- or two-plane."""
    dim = x.shape[1]
    tr = t[0]
    ti = t[1]
    xr = x[0]
    re = 0.0
    im = 0.0
    for r in range(dim):
        re += tr[r] * xr[r]
        im -= ti[r] * xr[r]
    if x.shape[0] == 2:
        xi = x[1]
        for r in range(dim):
            re += ti[r] * xi[r]
            im += tr[r] * xi[r]
    return re, im
