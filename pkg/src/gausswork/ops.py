r"""Elementary Gaussian operations as affine maps on moments.

Every operation is a pair (S, d) acting as Gamma -> S Gamma S^T and
x -> S x + d, with S symplectic.  Constructors produce operations embedded
in an N-mode system so they can be chained on multimode states directly.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from .core import MomentState, symplectic_form
from .exceptions import ValidationError

SYMPLECTIC_TOL = 1e-10

_SIGMA_Z = np.diag([1.0, -1.0])


@dataclasses.dataclass(frozen=True, eq=False)
class GaussianOp:
    """An affine Gaussian operation with a serializable label.

    kind is one of rotation, squeeze, two_mode_squeeze, beam_splitter,
    displacement, or sequence (for compositions); params holds the defining
    scalars and modes the target mode indices.
    """

    S: np.ndarray
    d: np.ndarray
    kind: str
    params: dict
    modes: tuple[int, ...]

    @property
    def n_modes(self) -> int:
        return self.S.shape[0] // 2


def _embed(block: np.ndarray, modes: tuple[int, ...], n_modes: int) -> np.ndarray:
    """Place a 2k x 2k block acting on the given modes inside 2N x 2N identity."""
    S = np.eye(2 * n_modes)
    idx = np.concatenate([[2 * m, 2 * m + 1] for m in modes])
    S[np.ix_(idx, idx)] = block
    return S


def _check_modes(modes, n_modes):
    for m in modes:
        if not 0 <= m < n_modes:
            raise ValidationError(f"mode index {m} out of range for {n_modes} modes")
    if len(set(modes)) != len(modes):
        raise ValidationError("target modes must be distinct")


def rotation(theta: float, mode: int = 0, n_modes: int = 1) -> GaussianOp:
    """Phase-space rotation R(theta) = [[cos, sin], [-sin, cos]] on one mode."""
    _check_modes((mode,), n_modes)
    c, s = np.cos(theta), np.sin(theta)
    block = np.array([[c, s], [-s, c]])
    return GaussianOp(
        S=_embed(block, (mode,), n_modes),
        d=np.zeros(2 * n_modes),
        kind="rotation",
        params={"theta": float(theta)},
        modes=(mode,),
    )


def squeeze(r: float, mode: int = 0, n_modes: int = 1) -> GaussianOp:
    """Single-mode squeeze diag(e^-r, e^r)."""
    _check_modes((mode,), n_modes)
    block = np.diag([np.exp(-r), np.exp(r)])
    return GaussianOp(
        S=_embed(block, (mode,), n_modes),
        d=np.zeros(2 * n_modes),
        kind="squeeze",
        params={"r": float(r)},
        modes=(mode,),
    )


def two_mode_squeeze(r: float, modes: tuple[int, int] = (0, 1), n_modes: int = 2) -> GaussianOp:
    """Two-mode squeeze [[cosh r * 1, sinh r * sz], [sinh r * sz, cosh r * 1]]."""
    _check_modes(modes, n_modes)
    ch, sh = np.cosh(r), np.sinh(r)
    block = np.block([
        [ch * np.eye(2), sh * _SIGMA_Z],
        [sh * _SIGMA_Z, ch * np.eye(2)],
    ])
    return GaussianOp(
        S=_embed(block, tuple(modes), n_modes),
        d=np.zeros(2 * n_modes),
        kind="two_mode_squeeze",
        params={"r": float(r)},
        modes=tuple(modes),
    )


def beam_splitter(theta: float, modes: tuple[int, int] = (0, 1), n_modes: int = 2) -> GaussianOp:
    """Beam splitter [[cos t * 1, sin t * 1], [sin t * 1, -cos t * 1]].

    theta = pi/2 swaps the two modes; the map is involutive for every theta.
    """
    _check_modes(modes, n_modes)
    c, s = np.cos(theta), np.sin(theta)
    block = np.block([
        [c * np.eye(2), s * np.eye(2)],
        [s * np.eye(2), -c * np.eye(2)],
    ])
    return GaussianOp(
        S=_embed(block, tuple(modes), n_modes),
        d=np.zeros(2 * n_modes),
        kind="beam_splitter",
        params={"theta": float(theta)},
        modes=tuple(modes),
    )


def displacement(d, n_modes: int | None = None) -> GaussianOp:
    """Phase-space displacement x -> x + d with identity S."""
    d = np.asarray(d, dtype=float).reshape(-1)
    if d.size % 2:
        raise ValidationError("displacement vector must have even length")
    n = d.size // 2 if n_modes is None else n_modes
    if d.size != 2 * n:
        raise ValidationError(f"displacement length {d.size} does not match {n} modes")
    return GaussianOp(
        S=np.eye(2 * n),
        d=d.copy(),
        kind="displacement",
        params={"d": [float(v) for v in d]},
        modes=tuple(range(n)),
    )


def is_symplectic(S: np.ndarray, tol: float = SYMPLECTIC_TOL) -> bool:
    S = np.asarray(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1] or S.shape[0] % 2:
        return False
    omega = symplectic_form(S.shape[0] // 2)
    return bool(np.max(np.abs(S @ omega @ S.T - omega)) <= tol)


def apply(op: GaussianOp, state: MomentState) -> MomentState:
    """Transform a state's moments: Gamma -> S Gamma S^T, x -> S x + d."""
    if op.S.shape[0] != 2 * state.n_modes:
        raise ValidationError(
            f"operation acts on {op.n_modes} modes, state has {state.n_modes}"
        )
    return MomentState(
        freqs=state.freqs,
        x=op.S @ state.x + op.d,
        cov=op.S @ state.cov @ op.S.T,
    )


def compose(ops) -> GaussianOp:
    """Compose operations applied left to right: ops[0] acts first."""
    ops = list(ops)
    if not ops:
        raise ValidationError("cannot compose an empty operation list")
    S = ops[0].S.copy()
    d = ops[0].d.copy()
    for op in ops[1:]:
        if op.S.shape != S.shape:
            raise ValidationError("composed operations act on different mode counts")
        d = op.S @ d + op.d
        S = op.S @ S
    modes = tuple(sorted({m for op in ops for m in op.modes}))
    return GaussianOp(
        S=S,
        d=d,
        kind="sequence",
        params={"length": len(ops)},
        modes=modes,
    )


def inverse(op: GaussianOp) -> GaussianOp:
    """Exact inverse: negated parameter per kind, beam splitters self-invert."""
    n = op.n_modes
    if op.kind == "rotation":
        return rotation(-op.params["theta"], op.modes[0], n)
    if op.kind == "squeeze":
        return squeeze(-op.params["r"], op.modes[0], n)
    if op.kind == "two_mode_squeeze":
        return two_mode_squeeze(-op.params["r"], op.modes, n)
    if op.kind == "beam_splitter":
        return beam_splitter(op.params["theta"], op.modes, n)
    if op.kind == "displacement":
        return displacement(-op.d, n)
    # generic fall-back: S is symplectic, so S^-1 = Omega^T S^T Omega
    omega = symplectic_form(n)
    S_inv = omega.T @ op.S.T @ omega
    return GaussianOp(
        S=S_inv,
        d=-(S_inv @ op.d),
        kind="sequence",
        params={"inverse_of": op.kind},
        modes=op.modes,
    )


def op_from_label(kind: str, params: dict, modes, n_modes: int) -> GaussianOp:
    """Rebuild an operation from its serialized label."""
    modes = tuple(int(m) for m in modes)
    if kind == "rotation":
        return rotation(float(params["theta"]), modes[0], n_modes)
    if kind == "squeeze":
        return squeeze(float(params["r"]), modes[0], n_modes)
    if kind == "two_mode_squeeze":
        return two_mode_squeeze(float(params["r"]), modes, n_modes)
    if kind == "beam_splitter":
        return beam_splitter(float(params["theta"]), modes, n_modes)
    if kind == "displacement":
        return displacement(np.asarray(params["d"], dtype=float), n_modes)
    raise ValidationError(f"unknown operation kind {kind!r}")


def describe(op: GaussianOp) -> str:
    """One-line human-readable description used in trace tables."""
    if op.kind == "rotation":
        return f"rotation(theta={op.params['theta']:.9g}) on mode {op.modes[0]}"
    if op.kind == "squeeze":
        return f"squeeze(r={op.params['r']:.9g}) on mode {op.modes[0]}"
    if op.kind == "two_mode_squeeze":
        return f"two_mode_squeeze(r={op.params['r']:.9g}) on modes {op.modes[0]},{op.modes[1]}"
    if op.kind == "beam_splitter":
        return f"beam_splitter(theta={op.params['theta']:.9g}) on modes {op.modes[0]},{op.modes[1]}"
    if op.kind == "displacement":
        norm = float(np.linalg.norm(op.d))
        return f"displacement(|d|={norm:.9g})"
    return f"{op.kind} on modes {op.modes}"


@dataclasses.dataclass(frozen=True, eq=False)
class ProtocolStep:
    """One protocol entry: the operation, its pipeline stage, and the energy after."""

    op: GaussianOp
    stage: str
    energy_after: float


PROTOCOL_STAGES = (
    "P1-displace",
    "P2-local",
    "P3-tms",
    "P3-realign",
    "P4-beamsplit",
)
