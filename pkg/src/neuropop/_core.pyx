# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementations of the hot kernels.

Mirrors `neuropop._kernels_np`; selected at import by `neuropop.backend`.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport sin, cos, tanh, exp, log1p, fabs

cnp.import_array()

BACKEND_NAME = "cython"


def cartpole_step(double x, double x_dot, double theta, double theta_dot,
                  double force, double gravity, double cart_mass,
                  double pole_mass, double half_length, double dt):
    """One explicit-Euler step of the cart-pole dynamics."""
    cdef double total_mass = cart_mass + pole_mass
    cdef double polemass_length = pole_mass * half_length
    cdef double sin_t = sin(theta)
    cdef double cos_t = cos(theta)
    cdef double temp = (force + polemass_length * theta_dot * theta_dot * sin_t) / total_mass
    cdef double theta_acc = (gravity * sin_t - cos_t * temp) / (
        half_length * (4.0 / 3.0 - pole_mass * cos_t * cos_t / total_mass))
    cdef double x_acc = temp - polemass_length * theta_acc * cos_t / total_mass
    x = x + dt * x_dot
    x_dot = x_dot + dt * x_acc
    theta = theta + dt * theta_dot
    theta_dot = theta_dot + dt * theta_acc
    return x, x_dot, theta, theta_dot


def layer_forward(double[:, :, ::1] W_in, double[:, ::1] b_in,
                  double[:, ::1] w_out, double[::1] b_out,
                  double[::1] x, double[::1] uniforms,
                  cnp.uint8_t[::1] actions, double[::1] probs,
                  double[::1] log_probs):
    """Sample one binary action per neuron in a layer (in-place outputs)."""
    cdef Py_ssize_t N = W_in.shape[0]
    cdef Py_ssize_t H = W_in.shape[1]
    cdef Py_ssize_t D = W_in.shape[2]
    cdef Py_ssize_t n, i, j
    cdef double z, u, h, log_p1, log_p0, p
    for n in range(N):
        u = b_out[n]
        for i in range(H):
            z = b_in[n, i]
            for j in range(D):
                z += W_in[n, i, j] * x[j]
            h = tanh(z)
            u += w_out[n, i] * h
        if u >= 0.0:
            log_p1 = -log1p(exp(-u))
            log_p0 = -u + log_p1
        else:
            log_p0 = -log1p(exp(u))
            log_p1 = u + log_p0
        p = exp(log_p1)
        probs[n] = p
        if uniforms[n] < p:
            actions[n] = 1
            log_probs[n] = log_p1
        else:
            actions[n] = 0
            log_probs[n] = log_p0


def layer_score_grad(double[:, :, ::1] W_in, double[:, ::1] b_in,
                     double[:, ::1] w_out, double[::1] b_out,
                     double[:, ::1] X, cnp.uint8_t[:, ::1] actions,
                     double[:, ::1] coeff,
                     double[:, :, ::1] gW_in, double[:, ::1] gb_in,
                     double[:, ::1] gw_out, double[::1] gb_out):
    """Score-function gradient summed over time (overwrites g* outputs)."""
    cdef Py_ssize_t T = X.shape[0]
    cdef Py_ssize_t N = W_in.shape[0]
    cdef Py_ssize_t H = W_in.shape[1]
    cdef Py_ssize_t D = W_in.shape[2]
    cdef Py_ssize_t t, n, i, j
    cdef double z, u, p, du, dz
    cdef double[::1] h = np.empty(H)
    gW_in[:, :, :] = 0.0
    gb_in[:, :] = 0.0
    gw_out[:, :] = 0.0
    gb_out[:] = 0.0
    for t in range(T):
        for n in range(N):
            u = b_out[n]
            for i in range(H):
                z = b_in[n, i]
                for j in range(D):
                    z += W_in[n, i, j] * X[t, j]
                h[i] = tanh(z)
                u += w_out[n, i] * h[i]
            if u > 500.0:
                u = 500.0
            elif u < -500.0:
                u = -500.0
            p = 1.0 / (1.0 + exp(-u))
            du = coeff[t, n] * (actions[t, n] - p)
            gb_out[n] += du
            for i in range(H):
                gw_out[n, i] += du * h[i]
                dz = du * w_out[n, i] * (1.0 - h[i] * h[i])
                gb_in[n, i] += dz
                for j in range(D):
                    gW_in[n, i, j] += dz * X[t, j]
