/* Vectorisable inner loops for the lattice kernels (restrict lets gcc use SIMD exp). */
#ifndef SSHG_STENCIL_H
#define SSHG_STENCIL_H
#include <math.h>

static inline double sg_sinh2(double x) {
    double e = exp(2.0 * x);
    return 0.5 * (e - 1.0 / e);
}

/* out[j] = second difference with ghost nodes lo, hi minus two_m2 * sinh(2 p[j]) */
static void sg_accel(const double *restrict p, long n, double lo, double hi,
                     double inv_dx2, double two_m2, double *restrict out) {
    if (n == 1) {
        out[0] = (lo - 2.0 * p[0] + hi) * inv_dx2 - two_m2 * sg_sinh2(p[0]);
        return;
    }
    for (long j = 1; j < n - 1; j++) {
        double e = exp(2.0 * p[j]);
        out[j] = (p[j - 1] - 2.0 * p[j] + p[j + 1]) * inv_dx2 - two_m2 * 0.5 * (e - 1.0 / e);
    }
    out[0] = (lo - 2.0 * p[0] + p[1]) * inv_dx2 - two_m2 * sg_sinh2(p[0]);
    out[n - 1] = (p[n - 2] - 2.0 * p[n - 1] + hi) * inv_dx2 - two_m2 * sg_sinh2(p[n - 1]);
}

/* sum over j of 0.5 v^2 + m2 (cosh 2phi - 1), with cosh 2x - 1 = 2 sinh(x)^2 */
static double sg_energy_density_sum(const double *restrict phi, const double *restrict v,
                                    long n, double m2) {
    double s = 0.0;
    for (long j = 0; j < n; j++) {
        double e = exp(phi[j]);
        double h = 0.5 * (e - 1.0 / e);
        s += 0.5 * v[j] * v[j] + 2.0 * m2 * h * h;
    }
    return s;
}

static double sg_gradient_sum(const double *restrict phi, long n) {
    double g = 0.0;
    for (long j = 0; j < n - 1; j++) {
        double d = phi[j + 1] - phi[j];
        g += d * d;
    }
    return g;
}
#endif
