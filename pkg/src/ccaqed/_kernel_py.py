"""Pure-numpy reference propagation kernel.

Adaptive Dormand-Prince (RK45) integration of the single-excitation
amplitude vector under a time-dependent non-Hermitian Hamiltonian, with
photon-flux accumulators integrated alongside the state.  The compiled
kernel in ``_kernel`` implements the identical algorithm.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"

# Dormand-Prince coefficients
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array(
    [5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40]
)

SEG_HOLD = 0
SEG_RAMP = 1
SEG_SINE_RECT = 2
SEG_SINE_SUPERGAUSS = 3


def _omega_q(t, bounds, codes, params):
    """Scalar omega_q(t) from the compiled schedule arrays."""
    k = int(np.searchsorted(bounds, t, side="left"))
    if k >= len(bounds):
        k = len(bounds) - 1
    start = bounds[k - 1] if k > 0 else 0.0
    tau = t - start
    code = codes[k]
    p = params[k]
    if code == SEG_HOLD:
        return p[0]
    if code == SEG_RAMP:
        return p[0] + (p[1] - p[0]) * tau / p[2]
    env = 1.0
    if code == SEG_SINE_SUPERGAUSS:
        dur = bounds[k] - start
        x = (tau - dur / 2.0) / p[3]
        env = np.exp(-0.5 * x ** (2 * int(p[4])))
    return p[0] + p[1] * env * np.sin(2 * np.pi * p[2] * tau)


def propagate(
    A,
    qubit_index,
    bounds,
    codes,
    params,
    c0,
    t_report,
    out_ports,
    w_int,
    rtol=1e-8,
    atol=1e-12,
):
    """Integrate dc/dt = -2 pi i (A + omega_q(t) P_q) c with flux records.

    ``A`` is the complex non-Hermitian matrix with the qubit diagonal entry
    zeroed; ``out_ports`` is ((i0, i1, w0, w1), (j0, j1, v0, v1)) defining
    the two output-field amplitudes w0*c[i0] + w1*c[i1]; ``w_int`` is the
    per-level internal-loss weight vector (1/ns units).  Returns
    (C[m, n], N_L[m], N_R[m], N_int[m]) on the reporting grid; report times
    and segment boundaries are hard integration breakpoints.
    """
    A = np.ascontiguousarray(A, dtype=complex)
    c = np.array(c0, dtype=complex)
    n = len(c)
    (i0, i1, w0, w1), (j0, j1, v0, v1) = out_ports
    w_int = np.asarray(w_int, dtype=float)
    two_pi = 2.0 * np.pi

    def rhs(t, c):
        dc = A @ c
        dc[qubit_index] += _omega_q(t, bounds, codes, params) * c[qubit_index]
        dc *= -1j * two_pi
        f_l = abs(w0 * c[i0] + w1 * c[i1]) ** 2
        f_r = abs(v0 * c[j0] + v1 * c[j1]) ** 2
        f_i = float(w_int @ (c.real**2 + c.imag**2))
        return dc, np.array([f_l, f_r, f_i])

    m = len(t_report)
    C = np.empty((m, n), dtype=complex)
    acc_out = np.empty((m, 3))
    acc = np.zeros(3)

    # hard breakpoints: report times plus interior segment boundaries
    checkpoints = np.union1d(t_report, bounds[bounds < t_report[-1]])
    checkpoints = checkpoints[checkpoints >= t_report[0]]
    report_set = {round(t, 12) for t in t_report}

    t = float(t_report[0])
    if round(t, 12) in report_set:
        idx = 0
        C[0] = c
        acc_out[0] = acc
        idx = 1
    else:
        idx = 0

    h = None
    k1, flux1 = rhs(t, c)
    for t_next in checkpoints:
        if t_next <= t:
            continue
        while t < t_next:
            if t_next - t < 1e-12:  # snap to breakpoint, avoid dead stepping
                t = t_next
                break
            if h is None:
                h = min(1e-3, t_next - t)
            h = min(h, t_next - t)
            # seven stages (FSAL: stage 7 at t+h)
            ks = [k1]
            fs = [flux1]
            for s in range(1, 7):
                cs = c + h * sum(a * k for a, k in zip(_A[s], ks))
                ks_s, fl_s = rhs(t + _C[s] * h, cs)
                ks.append(ks_s)
                fs.append(fl_s)
            c5 = c + h * sum(b * k for b, k in zip(_B5, ks))
            c4 = c + h * sum(b * k for b, k in zip(_B4, ks))
            a5 = acc + h * sum(b * f for b, f in zip(_B5, fs))
            a4 = acc + h * sum(b * f for b, f in zip(_B4, fs))
            scale = atol + rtol * np.maximum(np.abs(c), np.abs(c5))
            err_c = np.abs(c5 - c4) / scale
            err_a = np.abs(a5 - a4) / (atol + rtol * np.maximum(1.0, np.abs(a5)))
            err = float(np.sqrt((np.sum(err_c**2) + np.sum(err_a**2)) / (n + 3)))
            if err <= 1.0:
                t += h
                c = c5
                acc = a5
                k1, flux1 = ks[6], fs[6]
            factor = 0.9 * (err + 1e-16) ** (-0.2)
            h = h * min(5.0, max(0.2, factor))
            if h < 1e-12:
                raise RuntimeError(f"step size collapsed at t = {t:.6f} ns")
        if round(t_next, 12) in report_set:
            C[idx] = c
            acc_out[idx] = acc
            idx += 1
    return C, acc_out[:, 0], acc_out[:, 1], acc_out[:, 2]
