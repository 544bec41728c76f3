"""Pure-numpy implementations of the hot kernels.

Drop-in fallback for the compiled `neuropop._core` extension; same call
signatures, same outputs (up to floating-point summation order).
"""

import numpy as np

BACKEND_NAME = "numpy"


def cartpole_step(x, x_dot, theta, theta_dot, force, gravity, cart_mass,
                  pole_mass, half_length, dt):
    """One explicit-Euler step of the cart-pole dynamics.

    Returns the updated (x, x_dot, theta, theta_dot) tuple.
    """
    total_mass = cart_mass + pole_mass
    polemass_length = pole_mass * half_length
    sin_t = np.sin(theta)
    cos_t = np.cos(theta)
    temp = (force + polemass_length * theta_dot * theta_dot * sin_t) / total_mass
    theta_acc = (gravity * sin_t - cos_t * temp) / (
        half_length * (4.0 / 3.0 - pole_mass * cos_t * cos_t / total_mass)
    )
    x_acc = temp - polemass_length * theta_acc * cos_t / total_mass
    x = x + dt * x_dot
    x_dot = x_dot + dt * x_acc
    theta = theta + dt * theta_dot
    theta_dot = theta_dot + dt * theta_acc
    return x, x_dot, theta, theta_dot


def _logits(W_in, b_in, w_out, b_out, x):
    # hidden: (N, H); logit per neuron: (N,)
    h = np.tanh(np.einsum("nhd,d->nh", W_in, x) + b_in)
    u = np.einsum("nh,nh->n", w_out, h) + b_out
    return h, u


def layer_forward(W_in, b_in, w_out, b_out, x, uniforms, actions, probs, log_probs):
    """Sample one binary action per neuron in a layer.

    All neurons see the same input vector `x`; `uniforms[n]` is the draw
    from neuron n's own RNG stream. Writes into `actions` (uint8),
    `probs` and `log_probs` in place.
    """
    _, u = _logits(W_in, b_in, w_out, b_out, x)
    # log-sigmoid evaluated in overflow-safe form
    log_p1 = np.minimum(u, 0.0) - np.log1p(np.exp(-np.abs(u)))
    log_p0 = -np.maximum(u, 0.0) - np.log1p(np.exp(-np.abs(u)))
    p = np.exp(log_p1)
    a = uniforms < p
    actions[:] = a
    probs[:] = p
    log_probs[:] = np.where(a, log_p1, log_p0)


def layer_score_grad(W_in, b_in, w_out, b_out, X, actions, coeff,
                     gW_in, gb_in, gw_out, gb_out):
    """Score-function gradient, summed over time.

    Computes d/dtheta of sum_t coeff[t, n] * log pi_n(actions[t, n] | X[t])
    for every neuron n of the layer, overwriting the g* output arrays.
    """
    H = np.tanh(np.einsum("nhd,td->tnh", W_in, X) + b_in[None])
    U = np.einsum("nh,tnh->tn", w_out, H) + b_out[None]
    P = 1.0 / (1.0 + np.exp(-np.clip(U, -500.0, 500.0)))
    # d log pi / d logit
    dU = coeff * (actions - P)
    gb_out[:] = dU.sum(axis=0)
    gw_out[:] = np.einsum("tn,tnh->nh", dU, H)
    dZ = dU[:, :, None] * w_out[None] * (1.0 - H * H)
    gb_in[:] = dZ.sum(axis=0)
    gW_in[:] = np.einsum("tnh,td->nhd", dZ, X)
