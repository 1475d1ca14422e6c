# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled lattice kernels for the half-line sinh-Gordon scheme."""
from libc.math cimport exp


cdef extern from "_stencil.h" nogil:
    void sg_accel(const double* p, long n, double lo, double hi, double inv_dx2, double two_m2,
                  double* out)
    double sg_energy_density_sum(const double* phi, const double* v, long n, double m2)
    double sg_gradient_sum(const double* phi, long n)


cdef inline double _sinh2(double x) nogil:
    cdef double e = exp(2.0 * x)
    return 0.5 * (e - 1.0 / e)


cdef inline double _cosh2m1(double x) nogil:
    # cosh(2x) - 1 = 2 sinh(x)^2, accurate near the vacuum
    cdef double e = exp(x)
    cdef double s = 0.5 * (e - 1.0 / e)
    return 2.0 * s * s


def accel(const double[::1] phi, double ghost_lo, double ghost_hi, double inv_dx2,
          double two_m2, double[::1] out):
    """out = second difference of phi (with ghost nodes) - two_m2 * sinh(2 phi)."""
    sg_accel(&phi[0], phi.shape[0], ghost_lo, ghost_hi, inv_dx2, two_m2, &out[0])


def energy(const double[::1] phi, const double[::1] v, double dx, double m2):
    """Trapezoid kinetic+potential plus edge-gradient energy of one half-line."""
    cdef Py_ssize_t n = phi.shape[0]
    cdef double s, g, first, last
    with nogil:
        s = sg_energy_density_sum(&phi[0], &v[0], n, m2)
        g = sg_gradient_sum(&phi[0], n)
        first = 0.5 * v[0] * v[0] + m2 * _cosh2m1(phi[0])
        last = 0.5 * v[n - 1] * v[n - 1] + m2 * _cosh2m1(phi[n - 1])
    return dx * (s - 0.5 * (first + last)) + 0.5 * g / dx


def momentum(const double[::1] phi, const double[::1] v, double dx):
    """Trapezoid sum of v * phi_x with central interior and three-point end stencils."""
    cdef Py_ssize_t n = phi.shape[0], j
    cdef double s = 0.0, d0, d1
    with nogil:
        for j in range(1, n - 1):
            s += v[j] * (phi[j + 1] - phi[j - 1])
        d0 = -3.0 * phi[0] + 4.0 * phi[1] - phi[2]
        d1 = 3.0 * phi[n - 1] - 4.0 * phi[n - 2] + phi[n - 3]
        s += 0.5 * (v[0] * d0 + v[n - 1] * d1)
    return 0.5 * s


cdef inline void _closure(double p1m, double a, double at, double b, double p2p, double bt,
                          double c, double dx, double m, double s1, double s2, double alpha,
                          double* g1, double* g2, double* dc, double* resid) nogil:
    cdef double inv_dx2 = 1.0 / (dx * dx)
    cdef double epa = exp(a + c), epb = exp(b + c), ema = exp(a - c), emb = exp(b - c)
    cdef double sa = 0.5 * (epa - 1.0 / epa), sb = 0.5 * (epb - 1.0 / epb)
    cdef double da = 0.5 * (ema - 1.0 / ema), db = 0.5 * (emb - 1.0 / emb)
    cdef double ca = 0.5 * (epa + 1.0 / epa), cb = 0.5 * (epb + 1.0 / epb)
    cdef double ea = 0.5 * (ema + 1.0 / ema), eb = 0.5 * (emb + 1.0 / emb)
    cdef double ba = m * s1 * sa + m / s1 * da
    cdef double bb = m * s2 * sb + m / s2 * db
    cdef double bc = m * s1 * sa + m * s2 * sb - m / s1 * da - m / s2 * db
    cdef double hca = m * s1 * ca - m / s1 * ea
    cdef double hcb = m * s2 * cb - m / s2 * eb
    cdef double hcc = m * s1 * ca + m * s2 * cb + m / s1 * ea + m / s2 * eb
    cdef double h1 = p1m - 2.0 * dx * ba, h2 = p2p - 2.0 * dx * bb
    cdef double two_m2 = 2.0 * m * m
    cdef double A1 = (p1m - 2.0 * a + h1) * inv_dx2 - two_m2 * _sinh2(a)
    cdef double A2 = (h2 - 2.0 * b + p2p) * inv_dx2 - two_m2 * _sinh2(b)
    resid[0] = at - bt + bc
    dc[0] = -(A1 - A2 + hca * at + hcb * bt + alpha * resid[0]) / (4.0 / dx + hcc)
    g1[0] = h1 + 2.0 * dx * dc[0]
    g2[0] = h2 - 2.0 * dx * dc[0]


def defect_closure(double p1m, double a, double at, double b, double p2p, double bt, double c,
                   double dx, double m, double s1, double s2, double alpha):
    """Ghost values, d(phi_0)/dt and the constraint residual at the defect."""
    cdef double g1, g2, dc, resid
    _closure(p1m, a, at, b, p2p, bt, c, dx, m, s1, s2, alpha, &g1, &g2, &dc, &resid)
    return g1, g2, dc, resid


def rk4_defect_step(const double[::1] phi1, const double[::1] v1, const double[::1] phi2,
                    const double[::1] v2, double phi0, double dt, double dx, double m,
                    double s1, double s2, double alpha):
    """One RK4 step of the two half-lines and phi_0; returns new (phi1, v1, phi2, v2, phi0)."""
    import numpy as np
    cdef Py_ssize_t n1 = phi1.shape[0], n2 = phi2.shape[0], j
    cdef int stage
    work_np = np.empty((2, 3, max(n1, n2)))
    cdef double[:, :, ::1] w = work_np
    out1_np, ov1_np = np.empty(n1), np.empty(n1)
    out2_np, ov2_np = np.empty(n2), np.empty(n2)
    cdef double[::1] o1 = out1_np, ov1 = ov1_np, o2 = out2_np, ov2 = ov2_np
    # w[side, 0] = stage field, w[side, 1] = stage velocity, w[side, 2] = stage acceleration
    cdef double c = phi0, dc, g1, g2, resid, sum_c = 0.0, ch, bw
    cdef double inv_dx2 = 1.0 / (dx * dx), two_m2 = 2.0 * m * m, np1
    cdef double cstage[4]
    cdef double bweight[4]
    cstage[:] = [0.5, 0.5, 1.0, 0.0]
    bweight[:] = [1.0, 2.0, 2.0, 1.0]
    with nogil:
        for j in range(n1):
            w[0, 0, j] = phi1[j]; w[0, 1, j] = v1[j]; o1[j] = 0.0; ov1[j] = 0.0
        for j in range(n2):
            w[1, 0, j] = phi2[j]; w[1, 1, j] = v2[j]; o2[j] = 0.0; ov2[j] = 0.0
        for stage in range(4):
            _closure(w[0, 0, n1 - 2], w[0, 0, n1 - 1], w[0, 1, n1 - 1], w[1, 0, 0], w[1, 0, 1],
                     w[1, 1, 0], c, dx, m, s1, s2, alpha, &g1, &g2, &dc, &resid)
            sg_accel(&w[0, 0, 0], n1, w[0, 0, 1], g1, inv_dx2, two_m2, &w[0, 2, 0])
            sg_accel(&w[1, 0, 0], n2, g2, w[1, 0, n2 - 2], inv_dx2, two_m2, &w[1, 2, 0])
            bw = bweight[stage]
            ch = cstage[stage] * dt
            sum_c += bw * dc
            c = phi0 + ch * dc
            for j in range(n1):
                o1[j] += bw * w[0, 1, j]
                ov1[j] += bw * w[0, 2, j]
                np1 = phi1[j] + ch * w[0, 1, j]
                w[0, 1, j] = v1[j] + ch * w[0, 2, j]
                w[0, 0, j] = np1
            for j in range(n2):
                o2[j] += bw * w[1, 1, j]
                ov2[j] += bw * w[1, 2, j]
                np1 = phi2[j] + ch * w[1, 1, j]
                w[1, 1, j] = v2[j] + ch * w[1, 2, j]
                w[1, 0, j] = np1
        bw = dt / 6.0
        for j in range(n1):
            o1[j] = phi1[j] + bw * o1[j]
            ov1[j] = v1[j] + bw * ov1[j]
        for j in range(n2):
            o2[j] = phi2[j] + bw * o2[j]
            ov2[j] = v2[j] + bw * ov2[j]
    return out1_np, ov1_np, out2_np, ov2_np, phi0 + bw * sum_c
