"""Slow, independent reference implementations used only by the tests."""

import math

import mpmath as mp
import numpy as np


def hermite_function_mp(n, x, dps=40):
    with mp.workdps(dps):
        x = mp.mpf(x)
        val = mp.hermite(n, x) * mp.exp(-x * x / 2) / mp.sqrt(
            mp.power(2, n) * mp.factorial(n) * mp.sqrt(mp.pi))
        return float(val)


def coherent_series(n0, phi, n_max):
    """Term-by-term coherent amplitudes with exact factorials."""
    alpha = math.sqrt(n0) * complex(math.cos(phi), math.sin(phi))
    with mp.workdps(40):
        out = [complex(mp.exp(-mp.mpf(n0) / 2) * mp.mpc(alpha) ** n / mp.sqrt(mp.factorial(n)))
               for n in range(n_max + 1)]
    return np.array(out)


def kraus_operators(theta, dim):
    """Explicit loss and gain operator pairs as dense matrices."""
    n = np.arange(dim, dtype=float)
    lower = np.diag(np.ones(dim - 1), 1)
    loss = [np.diag(np.cos(theta * np.sqrt(n))), lower @ np.diag(np.sin(theta * np.sqrt(n)))]
    cg = np.cos(theta * np.sqrt(n + 1))
    sg = np.sin(theta * np.sqrt(n + 1))
    cg[-1], sg[-1] = 1.0, 0.0
    raise_ = np.diag(np.ones(dim - 1), -1)
    gain = [np.diag(cg), raise_ @ np.diag(sg)]
    return loss, gain


def kraus_reference(rho, theta, n_pairs):
    loss, gain = kraus_operators(theta, rho.shape[0])
    for _ in range(n_pairs):
        rho = sum(k @ rho @ k.conj().T for k in loss)
        rho = sum(k @ rho @ k.conj().T for k in gain)
    return rho


def mask_amplitude(n_init, loss_mask, gain_mask, theta, n_steps, top):
    """Amplitude factor of one flip pattern, walked atom by atom."""
    n, amp = n_init, 1.0
    for k in range(n_steps):
        if (loss_mask >> k) & 1:
            amp *= math.sin(theta * math.sqrt(n))
            n -= 1
        else:
            amp *= math.cos(theta * math.sqrt(n))
        if n < 0:
            return n, 0.0
        flip = (gain_mask >> k) & 1
        if n >= top:
            if flip:
                return n, 0.0
            continue
        if flip:
            amp *= math.sin(theta * math.sqrt(n + 1))
            n += 1
        else:
            amp *= math.cos(theta * math.sqrt(n + 1))
    return n, amp


def brute_reduced_density(amplitudes, theta, n_steps):
    """Partial trace by summing over every pair of masks explicitly."""
    d = len(amplitudes)
    rho = np.zeros((d, d), complex)
    for lm in range(1 << n_steps):
        for gm in range(1 << n_steps):
            branch = np.zeros(d, complex)
            for n0, a in enumerate(amplitudes):
                if a == 0:
                    continue
                n, f = mask_amplitude(n0, lm, gm, theta, n_steps, d - 1)
                if f != 0:
                    branch[n] += a * f
            rho += np.outer(branch, branch.conj())
    return rho


def naive_walk(n_init, theta2, n_steps, trials, rng, gain_offset=1):
    """One Bernoulli draw per atom, all trials in lockstep."""
    n = np.full(trials, n_init, np.int64)
    nl = np.zeros(trials, np.int64)
    na = np.zeros(trials, np.int64)
    for _ in range(n_steps):
        f = rng.random(trials) < theta2 * n
        nl += f
        n -= f
        g = rng.random(trials) < theta2 * (n + gain_offset)
        na += g
        n += g
    return nl, na
