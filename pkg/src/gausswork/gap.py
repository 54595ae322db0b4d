r"""Witness states for the gap between Gaussian and unrestricted extraction.

Three constructions, all verifiable against the Fock oracle:

* a pure state whose first and second moments match a given thermal-shaped
  covariance (so the moment-level machinery sees no extractable work while
  the full state is completely active),
* a fixed-entropy state with the same property at any prescribed entropy,
* an explicit two-level population swap that lowers the energy of a pair of
  thermal modes which is passive at the moment level.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np
from scipy.optimize import brentq

from .core import (
    MomentState,
    mean_energy,
    occupation_entropy,
    require_valid,
    state_entropy,
    symplectic_spectrum,
    thermal_state,
)
from .exceptions import TruncationError, ValidationError
from .extraction import (
    bs_angle,
    gaussian_ergotropy,
    is_gaussian_passive,
    minimal_gaussian_energy,
    nmode_gaussian_ergotropy,
)
from .fock import (
    TruncatedDensityMatrix,
    apply_gaussian_unitary,
    density_matrix,
    pure_state,
)
from .ops import apply, beam_splitter, inverse

__all__ = [
    "PureMatch",
    "match_pure_state",
    "pure_match_vector",
    "pure_match_state",
    "pure_match_two_mode",
    "pure_match_for_state",
    "thermal_beta_for_entropy",
    "FixedEntropyConstruction",
    "fixed_entropy_state",
    "GapReport",
    "ergotropy_gap",
    "SwapWitness",
    "thermal_swap_witness",
]


@dataclasses.dataclass(frozen=True)
class PureMatch:
    """Parameters of the pure state sqrt(p)|n> + sqrt(1-p)|n+3>."""

    level: int
    weight: float
    nu: float


def match_pure_state(nu: float) -> PureMatch:
    """Pure state whose quadrature moments equal those of covariance nu*I.

    A superposition of two number states three levels apart has vanishing
    first moments and isotropic covariance (number offsets below 3 would
    pollute <a> or <a^2>), so only the mean occupation needs tuning:
    (nu-1)/2 = n + 3*(1-p).
    """
    if nu < 1.0 - 1e-12:
        raise ValidationError(f"symplectic eigenvalue {nu} below vacuum")
    occ = max((nu - 1.0) / 2.0, 0.0)
    level = int(math.floor(occ))
    if occ - level >= 1.0:  # guard against floor(x)==x-1 at exact integers
        level += 1
    weight = 1.0 - (occ - level) / 3.0
    return PureMatch(level=level, weight=weight, nu=float(nu))


def pure_match_vector(match: PureMatch, dim: int) -> np.ndarray:
    if dim < match.level + 4:
        raise ValidationError(
            f"cutoff {dim} too small; need at least {match.level + 4}"
        )
    v = np.zeros(dim)
    v[match.level] = math.sqrt(match.weight)
    v[match.level + 3] = math.sqrt(1.0 - match.weight)
    return v


def pure_match_state(nu: float, freq: float, dim: int) -> TruncatedDensityMatrix:
    """Single-mode oracle state with moments (x=0, cov=nu*I) but zero entropy."""
    match = match_pure_state(nu)
    return pure_state(pure_match_vector(match, dim), [freq], dim)


def pure_match_two_mode(
    nu_a: float, nu_b: float, freqs, dim: int
) -> TruncatedDensityMatrix:
    """Product of pure matches: moments of diag(nu_a,nu_a,nu_b,nu_b), entropy 0."""
    va = pure_match_vector(match_pure_state(nu_a), dim)
    vb = pure_match_vector(match_pure_state(nu_b), dim)
    return pure_state(np.kron(va, vb), freqs, dim)


def pure_match_for_state(state: MomentState, dim: int) -> TruncatedDensityMatrix:
    """Zero-entropy oracle state with the moments of a Gaussian-passive pair.

    Covariances with correlated blocks (the equal-frequency passive case)
    are first rotated to a product by the energy-preserving beam splitter,
    matched mode by mode, then un-rotated in the oracle.
    """
    verdict = is_gaussian_passive(state)
    if not verdict.passive:
        raise ValidationError(
            "pure matching needs a Gaussian-passive state; violations: "
            + "; ".join(verdict.violations)
        )
    cov = state.cov
    c = 0.5 * (cov[0, 2] + cov[1, 3])
    if abs(c) <= 1e-12:
        return pure_match_two_mode(cov[0, 0], cov[2, 2], state.freqs, dim)
    a_t = 0.5 * (cov[0, 0] + cov[1, 1])
    b_t = 0.5 * (cov[2, 2] + cov[3, 3])
    splitter = beam_splitter(bs_angle(a_t, b_t, c), (0, 1), 2)
    rotated = apply(splitter, state)
    rho = pure_match_two_mode(
        rotated.cov[0, 0], rotated.cov[2, 2], state.freqs, dim
    )
    return apply_gaussian_unitary(inverse(splitter), rho)


def thermal_beta_for_entropy(entropy: float, freq: float = 1.0) -> float:
    """Inverse temperature of the single-mode thermal state with this entropy."""
    if entropy < 0:
        raise ValidationError("entropy must be nonnegative")
    if freq <= 0:
        raise ValidationError("frequency must be positive")
    if entropy == 0:
        return math.inf
    lo, hi = 1e-12, 1.0
    while occupation_entropy(lo) > entropy:
        lo /= 100.0
        if lo < 1e-280:
            raise ValidationError(f"entropy {entropy} out of solvable range")
    while occupation_entropy(hi) < entropy:
        hi *= 2.0
        if hi > 1e30:
            raise ValidationError(f"entropy {entropy} out of solvable range")
    occ = brentq(lambda m: occupation_entropy(m) - entropy, lo, hi, xtol=1e-15)
    return math.log1p(1.0 / occ) / freq


def _thermal_populations(beta: float, freq: float, dim: int) -> np.ndarray:
    p = np.zeros(dim)
    if math.isinf(beta):
        p[0] = 1.0
        return p
    q = math.exp(-beta * freq)
    p = (1.0 - q) * q ** np.arange(dim)
    return p / p.sum()


@dataclasses.dataclass(frozen=True)
class FixedEntropyConstruction:
    """A state of prescribed entropy matching covariance nu*I at one mode."""

    state: TruncatedDensityMatrix
    level: int
    mixing: float
    beta: float
    nu_thermal: float


def fixed_entropy_state(
    nu_target: float,
    entropy: float,
    freq: float = 1.0,
    cutoff: int = 60,
) -> FixedEntropyConstruction:
    """Build a state with entropy S whose moments match covariance nu*I.

    Starts from the thermal state of entropy S, then rotates the |0>,|n>
    plane (n >= 3, so no moment picks up off-diagonal terms) just enough to
    raise the mean occupation to (nu-1)/2.  Entropy is exactly preserved
    because the rotation is unitary.
    """
    if nu_target < 1.0 - 1e-12:
        raise ValidationError(f"target eigenvalue {nu_target} below vacuum")
    beta = thermal_beta_for_entropy(entropy, freq)
    occ_thermal = 0.0 if math.isinf(beta) else 1.0 / math.expm1(beta * freq)
    nu_thermal = 2.0 * occ_thermal + 1.0
    excess = (nu_target - nu_thermal) / 2.0
    if excess < -1e-12:
        raise ValidationError(
            f"entropy {entropy} forces occupation above the target covariance"
        )
    excess = max(excess, 0.0)
    pops = _thermal_populations(beta, freq, cutoff)
    level = None
    for n in range(3, cutoff // 2 + 1):
        if n * (pops[0] - pops[n]) >= excess - 1e-15:
            level = n
            break
    if level is None:
        suggestion = _suggest_cutoff(beta, freq, excess)
        raise TruncationError(
            f"no admissible rotation level below cutoff {cutoff}; "
            f"retry with cutoff >= {suggestion}"
        )
    denom = level * (pops[0] - pops[level])
    mixing = 0.0 if excess == 0.0 else excess / denom
    phi = math.asin(math.sqrt(mixing))
    u = np.eye(cutoff)
    u[0, 0] = u[level, level] = math.cos(phi)
    u[level, 0] = math.sin(phi)
    u[0, level] = -math.sin(phi)
    rho = u @ np.diag(pops) @ u.T
    state = density_matrix(rho, [freq], cutoff)
    return FixedEntropyConstruction(
        state=state,
        level=level,
        mixing=mixing,
        beta=beta,
        nu_thermal=nu_thermal,
    )


def _suggest_cutoff(beta: float, freq: float, excess: float) -> int:
    """Smallest even cutoff admitting a rotation level, from untruncated tails."""
    if math.isinf(beta):
        return 2 * (int(math.ceil(excess)) + 3)
    q = math.exp(-beta * freq)
    p0 = 1.0 - q
    for n in range(3, 100000):
        if n * (p0 - p0 * q**n) >= excess:
            return 2 * n
    raise ValidationError("no admissible rotation level exists")


@dataclasses.dataclass(frozen=True)
class GapReport:
    """Gaussian-extractable vs. entropy-limited extractable energy."""

    initial_energy: float
    entropy: float
    gaussian_extractable: float
    total_extractable: float
    gap: float
    free_energy_gap: float | None = None


def _min_energy_at_entropy(freqs: np.ndarray, entropy: float) -> float:
    """Least mean energy of any state of given entropy on these modes.

    The minimum over occupation splits is attained by a common-temperature
    thermal product, so this reduces to a one-dimensional root find in the
    inverse temperature.
    """
    if entropy == 0:
        return 0.0

    def total_entropy(beta):
        return sum(occupation_entropy(1.0 / math.expm1(beta * w)) for w in freqs)

    lo, hi = 1.0, 1.0
    while total_entropy(lo) < entropy:
        lo /= 2.0
        if lo < 1e-280:
            raise ValidationError(f"entropy {entropy} out of solvable range")
    while total_entropy(hi) > entropy:
        hi *= 2.0
        if hi > 1e280:
            raise ValidationError(f"entropy {entropy} out of solvable range")
    lo /= 2.0  # widen so the bracket is strict even if one loop never ran
    hi *= 2.0
    beta = brentq(lambda b: total_entropy(b) - entropy, lo, hi, xtol=1e-15)
    return sum(w / math.expm1(beta * w) for w in freqs)


def ergotropy_gap(
    state: MomentState,
    entropy: float | None = None,
    t_ref: float | None = None,
) -> GapReport:
    """Compare Gaussian-extractable work with the entropy-limited maximum.

    The total figure is E - E_min(S): no unitary protocol can push the state
    below the least energy compatible with its entropy, and some sequence of
    (generally non-Gaussian) unitaries approaches it.  With ``entropy=None``
    the entropy of the maximum-entropy state with these moments is used.
    """
    require_valid(state)
    energy = mean_energy(state)
    s0 = state_entropy(state) if entropy is None else float(entropy)
    if s0 < 0:
        raise ValidationError("entropy must be nonnegative")
    e_min = _min_energy_at_entropy(state.freqs, s0)
    if e_min > energy + 1e-9 * max(1.0, abs(energy)):
        raise ValidationError(
            f"entropy {s0} is unattainable at energy {energy}: "
            f"the least compatible energy is {e_min}"
        )
    total = max(energy - e_min, 0.0)
    if state.n_modes == 1:
        floor = minimal_gaussian_energy(symplectic_spectrum(state.cov), state.freqs)
        gaussian = energy - floor
    elif state.n_modes == 2:
        gaussian = gaussian_ergotropy(state).extracted_work
    else:
        gaussian = nmode_gaussian_ergotropy(state).extracted_work
    gaussian = max(gaussian, 0.0)
    free_gap = None
    if t_ref is not None:
        if t_ref <= 0:
            raise ValidationError("reference temperature must be positive")
        ref = thermal_state(state.freqs, t_ref)
        free_state = energy - t_ref * s0
        free_ref = mean_energy(ref) - t_ref * state_entropy(ref)
        free_gap = free_state - free_ref
    return GapReport(
        initial_energy=energy,
        entropy=s0,
        gaussian_extractable=gaussian,
        total_extractable=total,
        gap=total - gaussian,
        free_energy_gap=free_gap,
    )


@dataclasses.dataclass(frozen=True)
class SwapWitness:
    """A two-level population swap that lowers the energy of a thermal pair.

    Levels are (n_a, n_b) occupations of two equal-frequency modes with
    frequency normalized to 1; energy_drop is the extracted energy per swap.
    """

    x: int
    from_levels: tuple[int, int]
    to_levels: tuple[int, int]
    energy_drop: float


def thermal_swap_witness(temp_a: float, temp_b: float) -> SwapWitness | None:
    """Population inversion hidden in a pair of unequal-temperature modes.

    The product of two thermal states at equal frequency is passive at the
    moment level, yet whenever the temperatures differ the joint level
    (x/2, x/2) is less populated than (0, x+1) on the hotter side for the
    smallest even x exceeding 2*T_min/(T_max - T_min), so swapping those
    populations extracts energy.  Returns None when the temperatures match.
    """
    if temp_a < 0 or temp_b < 0:
        raise ValidationError("temperatures must be nonnegative")
    if temp_a == temp_b:
        return None
    t_min, t_max = sorted((temp_a, temp_b))
    threshold = 2.0 * t_min / (t_max - t_min)
    x = 2 * (int(math.floor(threshold / 2.0)) + 1)
    from_levels = (x // 2, x // 2)
    to_levels = (0, x + 1) if temp_b > temp_a else (x + 1, 0)

    def population(levels):
        out = 1.0
        for n, t in zip(levels, (temp_a, temp_b)):
            if t == 0:
                out *= 1.0 if n == 0 else 0.0
            else:
                q = math.exp(-1.0 / t)
                out *= (1.0 - q) * q**n
        return out

    p_from = population(from_levels)
    p_to = population(to_levels)
    drop = p_to - p_from
    if drop <= 0:
        raise ValidationError(
            "internal inconsistency: selected swap does not lower the energy"
        )
    return SwapWitness(
        x=x, from_levels=from_levels, to_levels=to_levels, energy_drop=drop
    )
