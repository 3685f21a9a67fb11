# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels for event-chain evolution.

Must stay numerically identical to ``_kernels_py.py``: same operation order
on separate real/imaginary doubles.  Built with -ffp-contract=off so no
fused multiply-adds sneak in.
"""
from libc.math cimport sqrt

cdef enum:
    OP_ROTATE = 0
    OP_ABSORB = 1
    OP_FINAL = 2


def evolve(const signed char[::1] op, const signed char[::1] mi,
           const signed char[::1] mj, const double[::1] cs, const double[::1] sn,
           double complex[::1] state, Py_ssize_t start, Py_ssize_t stop,
           double complex[:, ::1] leaks, double complex[:, ::1] slices=None):
    cdef double re[3]
    cdef double im[3]
    cdef Py_ssize_t k, q
    cdef int u, v
    cdef double c, s, xr, xi, yr, yi
    cdef bint record = slices is not None
    for q in range(3):
        re[q] = state[q].real
        im[q] = state[q].imag
    if record:
        for q in range(3):
            slices[start, q].real = re[q]
            slices[start, q].imag = im[q]
    for k in range(start, stop):
        if op[k] == OP_ROTATE:
            u = mi[k]
            v = mj[k]
            c = cs[k]
            s = sn[k]
            xr = re[u]
            xi = im[u]
            yr = re[v]
            yi = im[v]
            re[u] = c * xr - s * yr
            im[u] = c * xi - s * yi
            re[v] = s * xr + c * yr
            im[v] = s * xi + c * yi
        elif op[k] == OP_ABSORB:
            u = mi[k]
            leaks[k, 0].real = re[u]
            leaks[k, 0].imag = im[u]
            re[u] = 0.0
            im[u] = 0.0
        else:
            leaks[k, 0].real = re[0]
            leaks[k, 0].imag = im[0]
            leaks[k, 1].real = re[1]
            leaks[k, 1].imag = im[1]
            re[0] = 0.0
            im[0] = 0.0
            re[1] = 0.0
            im[1] = 0.0
        if record:
            for q in range(3):
                slices[k + 1, q].real = re[q]
                slices[k + 1, q].imag = im[q]
    for q in range(3):
        state[q].real = re[q]
        state[q].imag = im[q]


def backward(const signed char[::1] op, const signed char[::1] mi,
             const signed char[::1] mj, const double[::1] cs, const double[::1] sn,
             double complex[::1] phi, Py_ssize_t stop, double complex[:, ::1] out):
    cdef double re[3]
    cdef double im[3]
    cdef Py_ssize_t k, q
    cdef int u, v
    cdef double c, s, xr, xi, yr, yi
    for q in range(3):
        re[q] = phi[q].real
        im[q] = phi[q].imag
        out[stop, q].real = re[q]
        out[stop, q].imag = im[q]
    for k in range(stop - 1, -1, -1):
        if op[k] == OP_ROTATE:
            u = mi[k]
            v = mj[k]
            c = cs[k]
            s = sn[k]
            xr = re[u]
            xi = im[u]
            yr = re[v]
            yi = im[v]
            re[u] = c * xr + s * yr
            im[u] = c * xi + s * yi
            re[v] = c * yr - s * xr
            im[v] = c * yi - s * xi
        elif op[k] == OP_ABSORB:
            u = mi[k]
            re[u] = 0.0
            im[u] = 0.0
        else:
            re[0] = 0.0
            im[0] = 0.0
            re[1] = 0.0
            im[1] = 0.0
        for q in range(3):
            out[k, q].real = re[q]
            out[k, q].imag = im[q]


def trajectories(const signed char[::1] op, const signed char[::1] mi,
                 const signed char[::1] mj, const double[::1] cs, const double[::1] sn,
                 const signed char[::1] monitor_after, const double[:, ::1] uniforms,
                 long long[::1] out_event, signed char[::1] out_port,
                 unsigned char[:, ::1] out_found):
    cdef Py_ssize_t E = op.shape[0]
    cdef Py_ssize_t n_runs = uniforms.shape[0]
    cdef Py_ssize_t i, k, q, col, mon
    cdef long long ev
    cdef signed char port
    cdef int u, v
    cdef double re[3]
    cdef double im[3]
    cdef double c, s, xr, xi, yr, yi, pu, pa, pb, pc, tot, rest, r
    with nogil:
        for i in range(n_runs):
            re[0] = 1.0
            re[1] = 0.0
            re[2] = 0.0
            im[0] = 0.0
            im[1] = 0.0
            im[2] = 0.0
            col = 0
            mon = 0
            ev = -1
            port = 0
            for k in range(E):
                if op[k] == OP_ROTATE:
                    u = mi[k]
                    v = mj[k]
                    c = cs[k]
                    s = sn[k]
                    xr = re[u]
                    xi = im[u]
                    yr = re[v]
                    yi = im[v]
                    re[u] = c * xr - s * yr
                    im[u] = c * xi - s * yi
                    re[v] = s * xr + c * yr
                    im[v] = s * xi + c * yi
                elif op[k] == OP_ABSORB:
                    u = mi[k]
                    pu = re[u] * re[u] + im[u] * im[u]
                    tot = re[0] * re[0] + im[0] * im[0] + re[1] * re[1] + im[1] * im[1] \
                        + re[2] * re[2] + im[2] * im[2]
                    if uniforms[i, col] * tot < pu:
                        ev = k
                        break
                    col += 1
                    re[u] = 0.0
                    im[u] = 0.0
                    rest = sqrt(tot - pu)
                    for q in range(3):
                        re[q] = re[q] / rest
                        im[q] = im[q] / rest
                else:
                    pa = re[0] * re[0] + im[0] * im[0]
                    pb = re[1] * re[1] + im[1] * im[1]
                    ev = k
                    if uniforms[i, col] * (pa + pb) < pa:
                        port = 0
                    else:
                        port = 1
                    break
                if monitor_after[k]:
                    pc = re[2] * re[2] + im[2] * im[2]
                    tot = re[0] * re[0] + im[0] * im[0] + re[1] * re[1] + im[1] * im[1] + pc
                    if uniforms[i, col] * tot < pc:
                        out_found[i, mon] = 1
                        r = sqrt(pc)
                        re[0] = 0.0
                        im[0] = 0.0
                        re[1] = 0.0
                        im[1] = 0.0
                        re[2] = re[2] / r
                        im[2] = im[2] / r
                    else:
                        re[2] = 0.0
                        im[2] = 0.0
                        rest = sqrt(tot - pc)
                        for q in range(3):
                            re[q] = re[q] / rest
                            im[q] = im[q] / rest
                    col += 1
                    mon += 1
            out_event[i] = ev
            out_port[i] = port
