"""Field evolution through an alternating chain of loss and gain atoms.

Loss atoms start in the ground state and gain atoms in the excited state;
each atom meets the field once, in the order loss, gain, loss, gain, ...
Every encounter is an on-resonance two-level rotation by ``theta * sqrt(n)``
(loss) or ``theta * sqrt(n + 1)`` (gain).

Three backends:

* :func:`evolve_exact` keeps the field entangled with every atom. Each atom
  flip pattern (a branch) multiplies the initial amplitudes by a real,
  state-independent factor, so the joint state is stored as the initial
  vector plus branch sums grouped by net photon shift.
* :func:`evolve_kraus` evolves the reduced density matrix atom by atom.
* :func:`sample_walk` samples flip counts of a photon-number random walk.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional

import numpy as np

from . import kernels
from .density import DensityMatrix, fidelity
from .errors import (CapacityExceeded, DegenerateOverlap, DomainError, InvariantViolation,
                     ParamMismatch, PerturbativityViolated, TruncationOverflow)
from .fock import FockVector

PERTURBATIVE_LIMIT = 0.1
TOP_BIN_LIMIT = 1e-8
MAX_EXACT_STEPS = 14
MAX_EXACT_NMAX = 64
MAX_ENTRIES = 1 << 22
DEFAULT_SEED = 0xDEC0
WALK_CHUNK = 1 << 17


@dataclass(frozen=True)
class ChannelParams:
    """``eta`` absorption lengths split over ``n_steps`` loss/gain pairs."""

    eta: float
    n_steps: int

    def __post_init__(self):
        if not self.eta >= 0:
            raise DomainError(f"eta must be non-negative, got {self.eta}")
        if int(self.n_steps) != self.n_steps or self.n_steps < 1:
            raise DomainError(f"n_steps must be a positive integer, got {self.n_steps}")
        object.__setattr__(self, "n_steps", int(self.n_steps))

    @property
    def theta(self) -> float:
        return math.sqrt(self.eta / self.n_steps)

    @classmethod
    def from_theta(cls, theta: float, n_steps: int) -> "ChannelParams":
        return cls(n_steps * theta * theta, n_steps)

    def check_perturbative(self, n_max: int) -> None:
        if self.theta ** 2 * n_max > PERTURBATIVE_LIMIT:
            raise PerturbativityViolated(
                f"theta^2 n_max = {self.theta ** 2 * n_max:.3g} exceeds {PERTURBATIVE_LIMIT}")


@dataclass(frozen=True, eq=False)
class BranchSums:
    """Branch factors summed over all atom flip patterns.

    ``gram[s + n_steps]`` is the sum of ``f f^T`` over branches with net shift
    ``s`` (gains minus losses); ``counts[NL, NA, n]`` is the sum of ``f(n)^2``
    over branches with ``NL`` loss flips and ``NA`` gain flips.
    """

    theta: float
    n_steps: int
    dim: int
    gram: np.ndarray
    counts: np.ndarray


@lru_cache(maxsize=8)
def _branch_sums(theta: float, n_steps: int, dim: int) -> BranchSums:
    gram, counts = kernels.branch_gram(theta, n_steps, dim)
    gram.setflags(write=False)
    counts.setflags(write=False)
    return BranchSums(theta, n_steps, dim, gram, counts)


@dataclass(frozen=True, eq=False)
class JointPureState:
    """Field entangled with the atom chain.

    Holds the initial field vector and the branch sums; amplitudes over
    (photon number, loss mask, gain mask) are produced on demand by
    :meth:`entries` for small chains.
    """

    initial: FockVector
    params: ChannelParams
    branches: BranchSums

    @property
    def dim(self) -> int:
        return self.initial.dim

    def inner(self, other: "JointPureState") -> complex:
        """``<self|other>`` over field and atoms."""
        _check_pair(self, other)
        w = np.conj(self.initial.amplitudes) * other.initial.amplitudes
        total = self.branches.gram.diagonal(axis1=1, axis2=2).sum(axis=0)
        return complex(w @ total)

    def norm(self) -> float:
        return math.sqrt(self.inner(self).real)

    def entries(self) -> dict[tuple[int, int, int], complex]:
        """Nonzero amplitudes keyed by ``(n, loss_mask, gain_mask)``.

        Bit ``k`` of a mask is set when the ``k``-th atom of that kind
        flipped. Built by multiplying rotation factors atom by atom, which
        is independent of the branch sums.
        """
        n_steps = self.params.n_steps
        support = np.flatnonzero(self.initial.amplitudes)
        if (1 << (2 * n_steps)) * support.size > MAX_ENTRIES:
            raise CapacityExceeded("too many joint amplitudes to materialize")
        base = kernels.rotation_tables(self.params.theta, self.dim)
        top = self.dim - 1
        # each item: (photon number, loss mask, gain mask, amplitude)
        frontier = [(int(n), 0, 0, complex(self.initial.amplitudes[n])) for n in support]
        for k in range(n_steps):
            nxt = []
            for n, lm, gm, amp in frontier:
                keep = amp * base[kernels.LOSS, 0, n]
                flip = amp * base[kernels.LOSS, 1, n]
                if keep != 0:
                    nxt.append((n, lm, gm, keep))
                if flip != 0:
                    nxt.append((n - 1, lm | (1 << k), gm, flip))
            frontier = []
            for n, lm, gm, amp in nxt:
                keep = amp * base[kernels.GAIN, 0, n]
                flip = amp * base[kernels.GAIN, 1, n] if n < top else 0.0
                if keep != 0:
                    frontier.append((n, lm, gm, keep))
                if flip != 0:
                    frontier.append((n + 1, lm, gm | (1 << k), flip))
        return {(n, lm, gm): amp for n, lm, gm, amp in frontier}


def _check_pair(a: JointPureState, b: JointPureState) -> None:
    if a.params != b.params or a.dim != b.dim:
        raise ParamMismatch("joint states come from different channels or cutoffs")


def evolve_exact(initial: FockVector, params: ChannelParams) -> JointPureState:
    """Entangle ``initial`` with every atom of the chain, keeping all branches."""
    if params.n_steps > MAX_EXACT_STEPS:
        raise CapacityExceeded(f"n_steps={params.n_steps} above {MAX_EXACT_STEPS}")
    if initial.n_max > MAX_EXACT_NMAX:
        raise CapacityExceeded(f"n_max={initial.n_max} above {MAX_EXACT_NMAX}")
    sums = _branch_sums(float(params.theta), params.n_steps, initial.dim)
    joint = JointPureState(initial, params, sums)
    if abs(joint.norm() - 1.0) > 1e-10:
        raise InvariantViolation(f"joint norm {joint.norm()!r}")
    return joint


def cross_trace(a: JointPureState, b: JointPureState) -> np.ndarray:
    """Field operator ``tr_atoms |a><b|``.

    Only branches with identical flip patterns overlap, and such branches
    share the same shift ``s``, hence
    ``X[m, m'] = sum_s a[m-s] conj(b[m'-s]) G_s[m-s, m'-s]``.
    """
    _check_pair(a, b)
    d = a.dim
    n_steps = a.params.n_steps
    outer = np.outer(a.initial.amplitudes, np.conj(b.initial.amplitudes))
    out = np.zeros((d, d), np.complex128)
    for si in range(2 * n_steps + 1):
        s = si - n_steps
        g = a.branches.gram[si]
        if s >= 0:
            out[s:, s:] += (outer * g)[:d - s, :d - s]
        else:
            out[:d + s, :d + s] += (outer * g)[-s:, -s:]
    return out


def partial_trace(joint: JointPureState) -> DensityMatrix:
    """Reduced field state after discarding the atoms."""
    return DensityMatrix(_hermitize(cross_trace(joint, joint)))


def _hermitize(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.conj().T)


def env_overlap_exact(joint_a: JointPureState, joint_b: JointPureState) -> complex:
    """Overlap of the atom states entangled with two field inputs.

    The joint overlap ``<A|B>`` factorizes into a field part and an atom
    part. The field part of two mixed reduced states is taken as the root
    Uhlmann fidelity, the largest overlap any purification allows, so the
    atom part is ``|<A|B>| / sqrt(F(rho_A, rho_B))``. Returned as a
    non-negative real: the atom-side phase is not defined for mixed fields.
    """
    _check_pair(joint_a, joint_b)
    total = abs(joint_a.inner(joint_b))
    rho_a = partial_trace(joint_a)
    rho_b = partial_trace(joint_b)
    root_f = math.sqrt(fidelity(rho_a, rho_b))
    if root_f < 1e-300:
        raise DegenerateOverlap("reduced field states are orthogonal")
    return complex(total / root_f)


@dataclass(frozen=True, eq=False)
class EnvStatistics:
    """Distributions of loss flips, gain flips and net photon change.

    ``p_delta[k]`` is the probability of ``delta_n = k + delta_min``.
    """

    p_loss: np.ndarray
    p_gain: np.ndarray
    p_delta: np.ndarray
    delta_min: int
    conditioning_n: Optional[int] = None
    trials: Optional[int] = None

    def __post_init__(self):
        for name in ("p_loss", "p_gain", "p_delta"):
            p = np.asarray(getattr(self, name), dtype=np.float64)
            if abs(p.sum() - 1.0) > 1e-9:
                raise InvariantViolation(f"{name} sums to {p.sum()!r}")
            p.setflags(write=False)
            object.__setattr__(self, name, p)

    @property
    def loss_values(self) -> np.ndarray:
        return np.arange(self.p_loss.size)

    @property
    def gain_values(self) -> np.ndarray:
        return np.arange(self.p_gain.size)

    @property
    def delta_values(self) -> np.ndarray:
        return np.arange(self.p_delta.size) + self.delta_min

    def mean_loss(self) -> float:
        return float(self.p_loss @ self.loss_values)

    def mean_gain(self) -> float:
        return float(self.p_gain @ self.gain_values)

    def mean_delta(self) -> float:
        return float(self.p_delta @ self.delta_values)

    def std_loss(self) -> float:
        return _std(self.p_loss, self.loss_values)

    def std_delta(self) -> float:
        return _std(self.p_delta, self.delta_values)

    def delta_probability(self, value: int) -> float:
        k = value - self.delta_min
        return float(self.p_delta[k]) if 0 <= k < self.p_delta.size else 0.0

    def rows(self):
        """``(value, probability, kind)`` triples, kinds NL, NA, DN."""
        for v, p in zip(self.loss_values, self.p_loss):
            yield int(v), float(p), "NL"
        for v, p in zip(self.gain_values, self.p_gain):
            yield int(v), float(p), "NA"
        for v, p in zip(self.delta_values, self.p_delta):
            yield int(v), float(p), "DN"


def _std(p, v):
    mean = p @ v
    return float(math.sqrt(max(p @ (v - mean) ** 2, 0.0)))


def _stats_from_joint_counts(table: np.ndarray, conditioning_n=None, trials=None) -> EnvStatistics:
    """``table[NL, NA]`` to marginals."""
    table = table / table.sum()
    n_l, n_a = table.shape
    delta = np.zeros(n_l + n_a - 1)
    for nl in range(n_l):
        # delta = NA - NL, offset by n_l - 1
        delta[n_l - 1 - nl:n_l - 1 - nl + n_a] += table[nl]
    return EnvStatistics(table.sum(axis=1), table.sum(axis=0), delta, -(n_l - 1),
                         conditioning_n, trials)


def env_counts(joint: JointPureState) -> EnvStatistics:
    """Exact flip-count statistics of a joint state."""
    w = np.abs(joint.initial.amplitudes) ** 2
    table = joint.branches.counts @ w
    support = np.flatnonzero(w)
    cond = int(support[0]) if support.size == 1 else None
    return _stats_from_joint_counts(table, cond)


def number_state_counts(n: int, params: ChannelParams, n_max: Optional[int] = None) -> EnvStatistics:
    """Exact flip-count statistics for a number-state input, any chain length.

    A number state stays a number state along every branch, so the flip
    probabilities ``sin^2`` of the rotations only depend on the running
    counts and a dynamic program over ``(NL, NA)`` replaces enumeration.
    ``n_max`` puts the same reflecting top bin as the other backends.
    """
    n_steps = params.n_steps
    top = n + n_steps if n_max is None else n_max
    theta = params.theta
    table = np.zeros((n_steps + 1, n_steps + 1))
    table[0, 0] = 1.0
    nl = np.arange(n_steps + 1)[:, None]
    na = np.arange(n_steps + 1)[None, :]
    field = np.clip(n - nl + na, 0, top)
    p_loss = np.sin(theta * np.sqrt(field)) ** 2
    p_gain = np.where(field < top, np.sin(theta * np.sqrt(field + 1.0)) ** 2, 0.0)
    for _ in range(n_steps):
        moved = table * p_loss
        table = table - moved
        table[1:, :] += moved[:-1, :]
        moved = table * p_gain
        table = table - moved
        table[:, 1:] += moved[:, :-1]
    return _stats_from_joint_counts(table, n)


def evolve_kraus(initial, params: ChannelParams,
                 progress_sink: Optional[Callable[[int, int], None]] = None,
                 check_perturbative: bool = True) -> DensityMatrix:
    """Reduced-state evolution through ``params.n_steps`` loss/gain pairs.

    Each atom acts through the two operators obtained by tracing out the
    atom after its rotation, so the map is completely positive and trace
    preserving. ``progress_sink(done, total)`` is called between chunks of
    atom pairs.
    """
    rho0 = DensityMatrix.from_pure(initial) if isinstance(initial, FockVector) else initial
    if check_perturbative:
        params.check_perturbative(rho0.n_max)
    total = params.n_steps
    chunk = max(1, total // 50) if progress_sink else total
    m = rho0.elements
    done = 0
    while done < total:
        k = min(chunk, total - done)
        m = kernels.kraus_pairs(m, params.theta, k)
        done += k
        if progress_sink:
            progress_sink(done, total)
    rho = DensityMatrix(_hermitize(m))
    if rho.top_population() > TOP_BIN_LIMIT:
        raise TruncationOverflow(
            f"top-bin population {rho.top_population():.3g} at n_max={rho.n_max}")
    return rho


def evolve_operator(op: np.ndarray, params: ChannelParams) -> np.ndarray:
    """Apply the Kraus chain to an arbitrary operator such as ``|a><b|``."""
    return kernels.kraus_pairs(op, params.theta, params.n_steps)


def sample_walk(n_init: int, params: ChannelParams, trials: int, seed: int = DEFAULT_SEED,
                gain: str = "exact") -> EnvStatistics:
    """Monte Carlo flip counts with first-order flip probabilities.

    The loss probability is ``theta^2 n``. ``gain="exact"`` uses
    ``theta^2 (n + 1)`` for the gain atoms; ``gain="symmetric"`` uses
    ``theta^2 n``, which makes the walk unbiased. Trials are split in
    chunks, each driven by its own child of ``SeedSequence(seed)``.
    """
    if trials < 1:
        raise DomainError("trials must be positive")
    if n_init < 0:
        raise DomainError("n_init must be non-negative")
    offsets = {"exact": 1, "symmetric": 0}
    if gain not in offsets:
        raise DomainError(f"gain must be one of {sorted(offsets)}")
    n_chunks = -(-trials // WALK_CHUNK)
    children = np.random.SeedSequence(seed).spawn(n_chunks)
    nl_all, na_all = [], []
    for i, child in enumerate(children):
        size = min(WALK_CHUNK, trials - i * WALK_CHUNK)
        rng = np.random.Generator(np.random.PCG64(child))
        nl, na = kernels.walk_trials(n_init, params.theta ** 2, params.n_steps, size, rng,
                                     offsets[gain])
        nl_all.append(nl)
        na_all.append(na)
    nl = np.concatenate(nl_all)
    na = np.concatenate(na_all)
    delta = na - nl
    dmin = int(delta.min())
    return EnvStatistics(np.bincount(nl) / trials, np.bincount(na) / trials,
                         np.bincount(delta - dmin) / trials, dmin, n_init, trials)
