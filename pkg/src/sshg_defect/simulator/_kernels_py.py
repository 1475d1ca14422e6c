"""Pure-numpy versions of the lattice kernels (used when the extension is not built)."""
import math

import numpy as np


def accel(phi, ghost_lo, ghost_hi, inv_dx2, two_m2, out):
    padded = np.concatenate(([ghost_lo], phi, [ghost_hi]))
    out[:] = (padded[:-2] - 2.0 * phi + padded[2:]) * inv_dx2 - two_m2 * np.sinh(2.0 * phi)


def energy(phi, v, dx, m2):
    dens = 0.5 * v * v + m2 * (np.cosh(2.0 * phi) - 1.0)
    s = dx * (dens.sum() - 0.5 * (dens[0] + dens[-1]))
    d = np.diff(phi)
    return float(s + 0.5 * np.dot(d, d) / dx)


def momentum(phi, v, dx):
    d = np.gradient(phi, dx, edge_order=2)
    p = v * d
    return float(dx * (p.sum() - 0.5 * (p[0] + p[-1])))


def defect_closure(p1m, a, at, b, p2p, bt, c, dx, m, s1, s2, alpha):
    """Ghost values, d(phi_0)/dt and the constraint residual at the defect.

    ``p1m`` / ``p2p`` are the nodes next to x=0 on the left / right grid,
    ``a, b, c`` = phi_1(0), phi_2(0), phi_0 and ``at, bt`` their velocities.
    """
    inv_dx2 = 1.0 / (dx * dx)
    sa, sb = math.sinh(a + c), math.sinh(b + c)
    da, db = math.sinh(a - c), math.sinh(b - c)
    ba = m * s1 * sa + m / s1 * da
    bb = m * s2 * sb + m / s2 * db
    bc = m * s1 * sa + m * s2 * sb - m / s1 * da - m / s2 * db
    ca, cb = math.cosh(a + c), math.cosh(b + c)
    ea, eb = math.cosh(a - c), math.cosh(b - c)
    hca = m * s1 * ca - m / s1 * ea
    hcb = m * s2 * cb - m / s2 * eb
    hcc = m * s1 * ca + m * s2 * cb + m / s1 * ea + m / s2 * eb
    # boundary accelerations with the phi_0,t part of the ghost data held out
    g1 = p1m - 2.0 * dx * ba
    g2 = p2p - 2.0 * dx * bb
    two_m2 = 2.0 * m * m
    A1 = (p1m - 2.0 * a + g1) * inv_dx2 - two_m2 * math.sinh(2.0 * a)
    A2 = (g2 - 2.0 * b + p2p) * inv_dx2 - two_m2 * math.sinh(2.0 * b)
    resid = at - bt + bc
    # d/dt of the constraint is set to -alpha * constraint
    dphi0 = -(A1 - A2 + hca * at + hcb * bt + alpha * resid) / (4.0 / dx + hcc)
    return g1 + 2.0 * dx * dphi0, g2 - 2.0 * dx * dphi0, dphi0, resid


def _rhs(p1, v1, p2, v2, c, dx, m, s1, s2, alpha):
    g1, g2, dc, _ = defect_closure(p1[-2], p1[-1], v1[-1], p2[0], p2[1], v2[0], c, dx, m, s1, s2, alpha)
    inv_dx2, two_m2 = 1.0 / (dx * dx), 2.0 * m * m
    a1, a2 = np.empty_like(p1), np.empty_like(p2)
    # zero-Neumann outer ends: mirror ghosts
    accel(p1, p1[1], g1, inv_dx2, two_m2, a1)
    accel(p2, g2, p2[-2], inv_dx2, two_m2, a2)
    return v1, a1, v2, a2, dc


def rk4_defect_step(phi1, v1, phi2, v2, phi0, dt, dx, m, s1, s2, alpha):
    """One RK4 step of the two half-lines and phi_0; returns new (phi1, v1, phi2, v2, phi0)."""
    y = (phi1, v1, phi2, v2, phi0)
    args = (dx, m, s1, s2, alpha)
    k1 = _rhs(*y, *args)
    k2 = _rhs(*(yi + 0.5 * dt * ki for yi, ki in zip(y, k1)), *args)
    k3 = _rhs(*(yi + 0.5 * dt * ki for yi, ki in zip(y, k2)), *args)
    k4 = _rhs(*(yi + dt * ki for yi, ki in zip(y, k3)), *args)
    w = dt / 6.0
    out = tuple(yi + w * (a + 2.0 * b + 2.0 * c + d) for yi, a, b, c, d in zip(y, k1, k2, k3, k4))
    return out[0], out[1], out[2], out[3], float(out[4])
