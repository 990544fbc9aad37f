# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled propagation kernel.

Same algorithm as the NumPy reference in ``_kernel_py``: adaptive
Dormand-Prince (RK45) integration of the single-excitation amplitude vector
under a time-dependent non-Hermitian Hamiltonian, with photon-flux
accumulators carried alongside the state.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, fabs, pi, pow, sin, sqrt

cnp.import_array()

BACKEND = "cython"

ctypedef double complex dcomplex

cdef int SEG_HOLD = 0
cdef int SEG_RAMP = 1
cdef int SEG_SINE_RECT = 2
cdef int SEG_SINE_SUPERGAUSS = 3

# Dormand-Prince tableau
cdef double[7] C_NODES = [0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0]
cdef double[7][6] A_COEF = [
    [0, 0, 0, 0, 0, 0],
    [1.0 / 5, 0, 0, 0, 0, 0],
    [3.0 / 40, 9.0 / 40, 0, 0, 0, 0],
    [44.0 / 45, -56.0 / 15, 32.0 / 9, 0, 0, 0],
    [19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729, 0, 0],
    [9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656, 0],
    [35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84],
]
cdef double[7] B5 = [35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192,
                     -2187.0 / 6784, 11.0 / 84, 0.0]
cdef double[7] B4 = [5179.0 / 57600, 0.0, 7571.0 / 16695, 393.0 / 640,
                     -92097.0 / 339200, 187.0 / 2100, 1.0 / 40]


cdef double _omega_q_c(double t, double[::1] bounds, long[::1] codes,
                       double[:, ::1] params) nogil:
    cdef Py_ssize_t nseg = bounds.shape[0]
    cdef Py_ssize_t k = 0
    while k < nseg - 1 and bounds[k] < t:
        k += 1
    cdef double start = bounds[k - 1] if k > 0 else 0.0
    cdef double tau = t - start
    cdef long code = codes[k]
    cdef double env, x, dur
    if code == SEG_HOLD:
        return params[k, 0]
    if code == SEG_RAMP:
        return params[k, 0] + (params[k, 1] - params[k, 0]) * tau / params[k, 2]
    env = 1.0
    if code == SEG_SINE_SUPERGAUSS:
        dur = bounds[k] - start
        x = (tau - dur / 2.0) / params[k, 3]
        env = exp(-0.5 * pow(x, 2.0 * <int> params[k, 4]))
    return params[k, 0] + params[k, 1] * env * sin(2.0 * pi * params[k, 2] * tau)


cdef void _rhs(double t, dcomplex[::1] c, dcomplex[:, ::1] A,
               Py_ssize_t qubit_index, double[::1] bounds, long[::1] codes,
               double[:, ::1] params, Py_ssize_t i0, Py_ssize_t i1, double w0,
               double w1, Py_ssize_t j0, Py_ssize_t j1, double v0, double v1,
               double[::1] w_int, dcomplex[::1] dc, double* flux) nogil:
    cdef Py_ssize_t n = c.shape[0]
    cdef Py_ssize_t r, s
    cdef dcomplex acc
    cdef dcomplex minus_two_pi_i = -2.0j * pi
    cdef double fi = 0.0
    for r in range(n):
        acc = 0
        for s in range(n):
            acc = acc + A[r, s] * c[s]
        dc[r] = acc
    dc[qubit_index] = dc[qubit_index] + (
        _omega_q_c(t, bounds, codes, params) * c[qubit_index]
    )
    for r in range(n):
        dc[r] = minus_two_pi_i * dc[r]
        fi += w_int[r] * (c[r].real * c[r].real + c[r].imag * c[r].imag)
    cdef dcomplex al = w0 * c[i0] + w1 * c[i1]
    cdef dcomplex ar = v0 * c[j0] + v1 * c[j1]
    flux[0] = al.real * al.real + al.imag * al.imag
    flux[1] = ar.real * ar.real + ar.imag * ar.imag
    flux[2] = fi


def propagate(A, qubit_index, bounds, codes, params, c0, t_report, out_ports,
              w_int, rtol=1e-8, atol=1e-12):
    """Integrate dc/dt = -2 pi i (A + omega_q(t) P_q) c with flux records.

    Identical contract to the NumPy reference kernel: returns
    (C[m, n], N_L[m], N_R[m], N_int[m]) on the reporting grid; report times
    and segment boundaries are hard integration breakpoints.
    """
    cdef dcomplex[:, ::1] A_v = np.ascontiguousarray(A, dtype=np.complex128)
    cdef double[::1] bounds_v = np.ascontiguousarray(bounds, dtype=np.float64)
    cdef long[::1] codes_v = np.ascontiguousarray(codes, dtype=np.int64)
    cdef double[:, ::1] params_v = np.ascontiguousarray(params, dtype=np.float64)
    cdef double[::1] w_int_v = np.ascontiguousarray(w_int, dtype=np.float64)
    cdef Py_ssize_t qi = qubit_index
    cdef double rtol_c = rtol, atol_c = atol

    (i0_, i1_, w0_, w1_), (j0_, j1_, v0_, v1_) = out_ports
    cdef Py_ssize_t i0 = i0_, i1 = i1_, j0 = j0_, j1 = j1_
    cdef double w0 = w0_, w1 = w1_, v0 = v0_, v1 = v1_

    c_arr = np.array(c0, dtype=np.complex128)
    cdef dcomplex[::1] c = c_arr
    cdef Py_ssize_t n = c.shape[0]

    t_report = np.asarray(t_report, dtype=np.float64)
    cdef Py_ssize_t m = len(t_report)
    out_amps = np.empty((m, n), dtype=np.complex128)
    cdef dcomplex[:, ::1] out_v = out_amps
    acc_out = np.empty((m, 3), dtype=np.float64)
    cdef double[:, ::1] acc_out_v = acc_out

    bounds_np = np.asarray(bounds, dtype=np.float64)
    checkpoints_np = np.union1d(t_report, bounds_np[bounds_np < t_report[-1]])
    checkpoints_np = checkpoints_np[checkpoints_np >= t_report[0]]
    cdef double[::1] checkpoints = np.ascontiguousarray(checkpoints_np)
    report_set = {round(float(tk), 12) for tk in t_report}

    # stage storage
    ks = np.empty((7, n), dtype=np.complex128)
    cdef dcomplex[:, ::1] ks_v = ks
    fs = np.empty((7, 3), dtype=np.float64)
    cdef double[:, ::1] fs_v = fs
    cs = np.empty(n, dtype=np.complex128)
    cdef dcomplex[::1] cs_v = cs
    c5 = np.empty(n, dtype=np.complex128)
    cdef dcomplex[::1] c5_v = c5
    c4 = np.empty(n, dtype=np.complex128)
    cdef dcomplex[::1] c4_v = c4

    cdef double[3] acc
    cdef double[3] a5
    cdef double[3] a4
    cdef double[3] flux
    acc[0] = acc[1] = acc[2] = 0.0

    cdef double t = t_report[0]
    cdef Py_ssize_t idx = 0
    if round(float(t), 12) in report_set:
        out_amps[0] = c_arr
        acc_out[0, 0] = acc[0]
        acc_out[0, 1] = acc[1]
        acc_out[0, 2] = acc[2]
        idx = 1

    cdef double h = -1.0
    cdef double t_next, err, err_c, err_a, scale, diff, mag_c, mag_c5, factor
    cdef Py_ssize_t kcp, s, q, r
    cdef dcomplex stage_sum
    cdef double fsum
    cdef bint have_h = False

    _rhs(t, c, A_v, qi, bounds_v, codes_v, params_v, i0, i1, w0, w1,
         j0, j1, v0, v1, w_int_v, ks_v[0], flux)
    fs_v[0, 0] = flux[0]
    fs_v[0, 1] = flux[1]
    fs_v[0, 2] = flux[2]

    for kcp in range(checkpoints.shape[0]):
        t_next = checkpoints[kcp]
        if t_next <= t:
            continue
        while t < t_next:
            if t_next - t < 1e-12:
                t = t_next
                break
            if not have_h:
                h = min(1e-3, t_next - t)
                have_h = True
            if h > t_next - t:
                h = t_next - t
            # stages 2..7 (FSAL: stage 7 lands on t + h)
            for s in range(1, 7):
                for r in range(n):
                    stage_sum = 0
                    for q in range(s):
                        if A_COEF[s][q] != 0.0:
                            stage_sum = stage_sum + A_COEF[s][q] * ks_v[q, r]
                    cs_v[r] = c[r] + h * stage_sum
                _rhs(t + C_NODES[s] * h, cs_v, A_v, qi, bounds_v, codes_v,
                     params_v, i0, i1, w0, w1, j0, j1, v0, v1, w_int_v,
                     ks_v[s], flux)
                fs_v[s, 0] = flux[0]
                fs_v[s, 1] = flux[1]
                fs_v[s, 2] = flux[2]
            for r in range(n):
                stage_sum = 0
                for s in range(7):
                    if B5[s] != 0.0:
                        stage_sum = stage_sum + B5[s] * ks_v[s, r]
                c5_v[r] = c[r] + h * stage_sum
                stage_sum = 0
                for s in range(7):
                    stage_sum = stage_sum + B4[s] * ks_v[s, r]
                c4_v[r] = c[r] + h * stage_sum
            for q in range(3):
                fsum = 0.0
                for s in range(7):
                    if B5[s] != 0.0:
                        fsum += B5[s] * fs_v[s, q]
                a5[q] = acc[q] + h * fsum
                fsum = 0.0
                for s in range(7):
                    fsum += B4[s] * fs_v[s, q]
                a4[q] = acc[q] + h * fsum
            err = 0.0
            for r in range(n):
                mag_c = sqrt(c[r].real * c[r].real + c[r].imag * c[r].imag)
                mag_c5 = sqrt(c5_v[r].real * c5_v[r].real
                              + c5_v[r].imag * c5_v[r].imag)
                scale = atol_c + rtol_c * (mag_c if mag_c > mag_c5 else mag_c5)
                diff = sqrt(
                    (c5_v[r].real - c4_v[r].real) * (c5_v[r].real - c4_v[r].real)
                    + (c5_v[r].imag - c4_v[r].imag) * (c5_v[r].imag - c4_v[r].imag)
                )
                err_c = diff / scale
                err += err_c * err_c
            for q in range(3):
                scale = atol_c + rtol_c * (1.0 if fabs(a5[q]) < 1.0 else fabs(a5[q]))
                err_a = fabs(a5[q] - a4[q]) / scale
                err += err_a * err_a
            err = sqrt(err / (n + 3))
            if err <= 1.0:
                t += h
                for r in range(n):
                    c[r] = c5_v[r]
                    ks_v[0, r] = ks_v[6, r]
                for q in range(3):
                    acc[q] = a5[q]
                    fs_v[0, q] = fs_v[6, q]
            factor = 0.9 * pow(err + 1e-16, -0.2)
            if factor > 5.0:
                factor = 5.0
            elif factor < 0.2:
                factor = 0.2
            h = h * factor
            if h < 1e-12:
                raise RuntimeError(f"step size collapsed at t = {t:.6f} ns")
        if round(float(t_next), 12) in report_set:
            for r in range(n):
                out_v[idx, r] = c[r]
            acc_out_v[idx, 0] = acc[0]
            acc_out_v[idx, 1] = acc[1]
            acc_out_v[idx, 2] = acc[2]
            idx += 1
    return out_amps, acc_out[:, 0], acc_out[:, 1], acc_out[:, 2]
