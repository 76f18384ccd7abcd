"""Hot loops: branch enumeration, Kraus sweeps and walk rounds.

Every kernel has a numba version and a numpy version. The public
functions pick one according to ``_accel.NUMBA_ENABLED``; both are always
importable so the benchmark and the tests can compare them directly.
"""

import numpy as np

from ._accel import NUMBA_ENABLED, optional_njit

LOSS, GAIN = 0, 1


def rotation_tables(theta, dim):
    """cos/sin factors of the loss and gain rotations on ``0..dim-1``.

    Returns an array ``base[kind, bit, n]``: ``bit=0`` keeps the atom in its
    initial level (cosine), ``bit=1`` flips it (sine). The gain flip is
    switched off in the top bin so the truncated map stays trace preserving.
    """
    n = np.arange(dim, dtype=np.float64)
    base = np.empty((2, 2, dim))
    base[LOSS, 0] = np.cos(theta * np.sqrt(n))
    base[LOSS, 1] = np.sin(theta * np.sqrt(n))
    base[GAIN, 0] = np.cos(theta * np.sqrt(n + 1.0))
    base[GAIN, 1] = np.sin(theta * np.sqrt(n + 1.0))
    base[GAIN, 0, dim - 1] = 1.0
    base[GAIN, 1, dim - 1] = 0.0
    return base


def shifted_tables(theta, n_steps, dim):
    """``T[kind, bit, s + n_steps, i] = base[kind, bit, clip(i + s)]``.

    Branch factors are tracked per initial photon number ``i``; after a net
    shift ``s`` the field sits at ``i + s``. Clipped entries only ever meet
    branches whose factor is already zero.
    """
    base = rotation_tables(theta, dim)
    shifts = np.arange(-n_steps, n_steps + 1)
    idx = np.clip(np.arange(dim)[None, :] + shifts[:, None], 0, dim - 1)
    return np.ascontiguousarray(base[:, :, idx])


@optional_njit(cache=True)
def _gram_numba(T, n_steps, dim, block):
    depth = 2 * n_steps
    n_shift = 2 * n_steps + 1
    gram = np.zeros((n_shift, dim, dim))
    counts = np.zeros((n_steps + 1, n_steps + 1, dim))
    buf = np.zeros((n_shift, block, dim))
    fill = np.zeros(n_shift, np.int64)
    F = np.zeros((depth, dim))
    F[0, :] = 1.0
    sh = np.zeros(depth + 1, np.int64)
    nl = np.zeros(depth + 1, np.int64)
    na = np.zeros(depth + 1, np.int64)
    start = 0
    for leaf in range(1 << depth):
        # depth-first: only the levels below the last changed bit are redone
        for k in range(start, depth - 1):
            bit = (leaf >> (depth - 1 - k)) & 1
            kind = k & 1
            t = T[kind, bit, sh[k] + n_steps]
            src = F[k]
            dst = F[k + 1]
            for i in range(dim):
                dst[i] = src[i] * t[i]
            if kind == 0:
                sh[k + 1] = sh[k] - bit
                nl[k + 1] = nl[k] + bit
                na[k + 1] = na[k]
            else:
                sh[k + 1] = sh[k] + bit
                nl[k + 1] = nl[k]
                na[k + 1] = na[k] + bit
        k = depth - 1
        bit = leaf & 1
        t = T[1, bit, sh[k] + n_steps]
        si = sh[k] + bit + n_steps
        c = fill[si]
        row = buf[si, c]
        src = F[k]
        h = counts[nl[k], na[k] + bit]
        for i in range(dim):
            v = src[i] * t[i]
            row[i] = v
            h[i] += v * v
        fill[si] = c + 1
        if c + 1 == block:
            b = buf[si]
            gram[si] += b.T @ b
            fill[si] = 0
        trailing = 0
        x = leaf
        while x & 1:
            trailing += 1
            x >>= 1
        start = depth - 1 - trailing
        if start > depth - 2:
            start = depth - 1
    for si in range(n_shift):
        c = fill[si]
        if c > 0:
            b = buf[si, :c].copy()
            gram[si] += b.T @ b
    return gram, counts


def _gram_numpy(T, n_steps, dim, suffix_depth=12):
    depth = 2 * n_steps
    tail = min(depth, suffix_depth)
    head = depth - tail
    gram = np.zeros((2 * n_steps + 1, dim, dim))
    counts = np.zeros((n_steps + 1, n_steps + 1, dim))
    for prefix in range(1 << head):
        f = np.ones((1, dim))
        sh = np.zeros(1, np.int64)
        nl = np.zeros(1, np.int64)
        na = np.zeros(1, np.int64)
        for k in range(depth):
            kind = k & 1
            if k < head:
                bits = np.array([(prefix >> (head - 1 - k)) & 1])
            else:
                # breadth-first: duplicate every row, one copy per atom outcome
                f = np.concatenate([f, f])
                sh = np.concatenate([sh, sh])
                nl = np.concatenate([nl, nl])
                na = np.concatenate([na, na])
                bits = np.repeat(np.array([0, 1]), f.shape[0] // 2)
            f = f * T[kind, bits, sh + n_steps]
            if kind == LOSS:
                sh = sh - bits
                nl = nl + bits
            else:
                sh = sh + bits
                na = na + bits
        np.add.at(counts, (nl, na), f * f)
        order = np.argsort(sh, kind="stable")
        sh_sorted = sh[order]
        values, first = np.unique(sh_sorted, return_index=True)
        bounds = np.append(first, len(order))
        for j, s in enumerate(values):
            rows = f[order[bounds[j]:bounds[j + 1]]]
            gram[s + n_steps] += rows.T @ rows
    return gram, counts


def branch_gram(theta, n_steps, dim, accelerated=None):
    """Sum ``f f^T`` over every atom-flip branch, grouped by net photon shift.

    ``f[i]`` is the real amplitude factor a branch applies to initial photon
    number ``i``. Returns ``(gram, counts)`` with ``gram[s + n_steps]`` the
    Gram matrix of all branches with shift ``s`` and ``counts[NL, NA, i]``
    the summed squared factors of branches with those flip counts.
    """
    T = shifted_tables(theta, n_steps, dim)
    use = NUMBA_ENABLED if accelerated is None else accelerated
    if use and NUMBA_ENABLED:
        return _gram_numba(T, n_steps, dim, 256)
    return _gram_numpy(T, n_steps, dim)


@optional_njit(cache=True)
def _kraus_numba(rho, base, n_pairs):
    d = rho.shape[0]
    cl, sl = base[0, 0], base[0, 1]
    cg, sg = base[1, 0], base[1, 1]
    for _ in range(n_pairs):
        # ascending sweep reads (m+1, m'+1) before it is overwritten
        for m in range(d):
            for mp in range(d):
                v = cl[m] * cl[mp] * rho[m, mp]
                if m + 1 < d and mp + 1 < d:
                    v += sl[m + 1] * sl[mp + 1] * rho[m + 1, mp + 1]
                rho[m, mp] = v
        for m in range(d - 1, -1, -1):
            for mp in range(d - 1, -1, -1):
                v = cg[m] * cg[mp] * rho[m, mp]
                if m > 0 and mp > 0:
                    v += sg[m - 1] * sg[mp - 1] * rho[m - 1, mp - 1]
                rho[m, mp] = v
    return rho


def _kraus_numpy(rho, base, n_pairs):
    CL = np.outer(base[0, 0], base[0, 0])
    SL = np.outer(base[0, 1], base[0, 1])[1:, 1:]
    CG = np.outer(base[1, 0], base[1, 0])
    SG = np.outer(base[1, 1], base[1, 1])[:-1, :-1]
    for _ in range(n_pairs):
        out = CL * rho
        out[:-1, :-1] += SL * rho[1:, 1:]
        rho = CG * out
        rho[1:, 1:] += SG * out[:-1, :-1]
    return rho


def kraus_pairs(rho, theta, n_pairs, accelerated=None):
    """Apply ``n_pairs`` loss-then-gain atom channels to an operator.

    The map is linear, so ``rho`` may be any square complex matrix, not only
    a density matrix. Returns a new array.
    """
    base = rotation_tables(theta, rho.shape[0])
    work = np.array(rho, dtype=np.complex128, copy=True)
    use = NUMBA_ENABLED if accelerated is None else accelerated
    if use and NUMBA_ENABLED:
        return _kraus_numba(work, base, n_pairs)
    return _kraus_numpy(work, base, n_pairs)


def _geometric_gaps(u, p, cap):
    # trials until the first success, capped; p == 0 never succeeds
    with np.errstate(divide="ignore", invalid="ignore"):
        g = np.ceil(np.log(u) / np.log1p(-p))
    g = np.where(np.isfinite(g), g, cap)
    return np.clip(g, 1.0, cap).astype(np.int64)


@optional_njit(cache=True)
def _walk_round_numba(u, theta2, gain_offset, depth, pos, n, nl, na, active):
    cap = 4.0 * depth
    alive = 0
    for t in range(pos.shape[0]):
        if not active[t]:
            continue
        pl = min(theta2 * n[t], 1.0)
        pg = min(theta2 * (n[t] + gain_offset), 1.0)
        gl = cap
        gg = cap
        if pl > 0.0:
            gl = min(max(np.ceil(np.log(u[t, 0]) / np.log1p(-pl)), 1.0), cap) if pl < 1.0 else 1.0
        if pg > 0.0:
            gg = min(max(np.ceil(np.log(u[t, 1]) / np.log1p(-pg)), 1.0), cap) if pg < 1.0 else 1.0
        jl = (pos[t] + 1) // 2 + np.int64(gl) - 1
        jg = pos[t] // 2 + np.int64(gg) - 1
        el = 2 * jl
        eg = 2 * jg + 1
        ev = min(el, eg)
        if ev >= depth:
            active[t] = False
            continue
        if el < eg:
            n[t] -= 1
            nl[t] += 1
        else:
            n[t] += 1
            na[t] += 1
        pos[t] = ev + 1
        alive += 1
    return alive


def _walk_round_numpy(u, theta2, gain_offset, depth, pos, n, nl, na, active):
    cap = 4.0 * depth
    pl = np.minimum(theta2 * n, 1.0)
    pg = np.minimum(theta2 * (n + gain_offset), 1.0)
    gl = _geometric_gaps(u[:, 0], pl, cap)
    gg = _geometric_gaps(u[:, 1], pg, cap)
    el = 2 * ((pos + 1) // 2 + gl - 1)
    eg = 2 * (pos // 2 + gg - 1) + 1
    ev = np.minimum(el, eg)
    active &= ev < depth
    is_loss = active & (el < eg)
    is_gain = active & (eg < el)
    n -= is_loss
    nl += is_loss
    n += is_gain
    na += is_gain
    pos[active] = ev[active] + 1
    return int(active.sum())


def walk_trials(n_init, theta2, n_steps, trials, rng, gain_offset=1, accelerated=None):
    """Sample flip counts for ``trials`` independent photon-number walks.

    Atoms alternate loss, gain, loss, ... Instead of drawing one Bernoulli
    per atom, each round draws the gap to the next loss flip and to the next
    gain flip with the current flip probabilities and commits whichever
    comes first. Returns ``(NL, NA)`` arrays.
    """
    depth = 2 * n_steps
    pos = np.zeros(trials, np.int64)
    n = np.full(trials, n_init, np.int64)
    nl = np.zeros(trials, np.int64)
    na = np.zeros(trials, np.int64)
    active = np.ones(trials, bool)
    use = NUMBA_ENABLED if accelerated is None else accelerated
    step = _walk_round_numba if (use and NUMBA_ENABLED) else _walk_round_numpy
    alive = trials
    while alive:
        # same draws for both code paths, so results are identical
        u = 1.0 - rng.random((trials, 2))
        alive = step(u, theta2, float(gain_offset), depth, pos, n, nl, na, active)
    return nl, na
