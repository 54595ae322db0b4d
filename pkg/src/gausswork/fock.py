r"""Truncated Fock-space oracle for one- and two-mode computations.

Everything here is independent of the moment-level code paths: states are
density matrices on a photon-number cutoff, operations are matrix
exponentials of their quadratic generators, and energies come from number
operators.  Used to cross-check the closed-form moment machinery.
"""

from __future__ import annotations

import dataclasses
import math
import warnings

import numpy as np
import scipy.linalg
import scipy.sparse
from scipy.optimize import minimize

from .core import MomentState
from .exceptions import (
    BudgetWarning,
    TruncationError,
    TruncationWarning,
    ValidationError,
)
from .ops import GaussianOp

TAIL_WARN = 1e-8
TAIL_ERROR = 1e-4
CUTOFF_CAP = 80

_SQRT2 = math.sqrt(2.0)


def ladder(dim: int) -> np.ndarray:
    """Annihilation operator on a dim-level truncation: a|n> = sqrt(n)|n-1>."""
    if dim < 2:
        raise ValidationError("cutoff must be at least 2")
    return np.diag(np.sqrt(np.arange(1.0, dim)), 1)


def _check_dim(dim: int) -> None:
    if not 2 <= dim <= CUTOFF_CAP:
        raise ValidationError(f"cutoff {dim} outside supported range [2, {CUTOFF_CAP}]")


def _internal_dim(dim: int) -> int:
    return max(int(math.ceil(1.5 * dim)), dim + 10)


@dataclasses.dataclass(eq=False)
class TruncatedDensityMatrix:
    """A density matrix on (dim)^n_modes levels with per-mode frequencies.

    The state is stored either densely (matrix), as weighted pure components
    (weights w_k and column vectors v_k with rho = sum_k w_k |v_k><v_k|), or
    both.  Components let conjugations and moment evaluations run on stacked
    vectors instead of dense matrices; the dense form is assembled lazily.
    leak records trace lost to cutoff projections.
    """

    dim: int
    freqs: np.ndarray
    matrix: np.ndarray | None = None
    weights: np.ndarray | None = None
    vectors: np.ndarray | None = None
    leak: float = 0.0

    def __post_init__(self):
        freqs = np.atleast_1d(np.asarray(self.freqs, dtype=float))
        if freqs.size not in (1, 2):
            raise ValidationError("oracle states support one or two modes")
        if np.any(freqs <= 0):
            raise ValidationError("mode frequencies must be positive")
        _check_dim(self.dim)
        size = self.dim ** freqs.size
        if self.matrix is None and self.weights is None:
            raise ValidationError("state needs a matrix or pure components")
        if self.matrix is not None:
            matrix = np.asarray(self.matrix, dtype=complex)
            if matrix.shape != (size, size):
                raise ValidationError(
                    f"matrix shape {matrix.shape} does not match cutoff {self.dim}"
                )
            self.matrix = matrix
        if self.weights is not None:
            self.weights = np.asarray(self.weights, dtype=float).reshape(-1)
            self.vectors = np.asarray(self.vectors, dtype=complex)
            if self.vectors.shape != (size, self.weights.size):
                raise ValidationError("component vectors must be columns of size^n")
        self.freqs = freqs

    @property
    def n_modes(self) -> int:
        return self.freqs.size

    def dense(self) -> np.ndarray:
        """The density matrix itself, assembled from components if needed."""
        if self.matrix is None:
            self.matrix = (self.vectors * self.weights) @ self.vectors.conj().T
        return self.matrix

    def _component_parts(self) -> tuple[np.ndarray, np.ndarray]:
        """Weights and stacked vectors, decomposing the matrix if needed."""
        if self.weights is None:
            eigs, vecs = np.linalg.eigh(self.matrix)
            keep = eigs > 1e-14
            self.weights = eigs[keep]
            self.vectors = np.ascontiguousarray(vecs[:, keep], dtype=complex)
        return self.weights, self.vectors


def density_matrix(matrix, freqs, dim: int | None = None) -> TruncatedDensityMatrix:
    """Wrap and validate an explicit density matrix."""
    matrix = np.asarray(matrix, dtype=complex)
    freqs = np.atleast_1d(np.asarray(freqs, dtype=float))
    if dim is None:
        dim = round(matrix.shape[0] ** (1.0 / freqs.size))
    herm = float(np.max(np.abs(matrix - matrix.T.conj())))
    if herm > 1e-12:
        raise ValidationError(f"matrix not Hermitian (residual {herm:.3e})")
    tr = float(np.real(np.trace(matrix)))
    if abs(tr - 1.0) > 1e-10:
        raise ValidationError(f"trace {tr} differs from 1")
    return TruncatedDensityMatrix(dim=dim, freqs=freqs, matrix=matrix)


def pure_state(vector, freqs, dim: int | None = None) -> TruncatedDensityMatrix:
    vector = np.asarray(vector, dtype=complex).reshape(-1)
    freqs = np.atleast_1d(np.asarray(freqs, dtype=float))
    if dim is None:
        dim = round(vector.size ** (1.0 / freqs.size))
    norm = float(np.linalg.norm(vector))
    if abs(norm - 1.0) > 1e-10:
        raise ValidationError(f"state vector norm {norm} differs from 1")
    return TruncatedDensityMatrix(
        dim=dim,
        freqs=freqs,
        weights=np.array([1.0]),
        vectors=vector.copy().reshape(-1, 1),
    )


def mixture(weights, vectors, freqs, dim: int | None = None) -> TruncatedDensityMatrix:
    weights = np.asarray(weights, dtype=float).reshape(-1)
    if abs(float(weights.sum()) - 1.0) > 1e-10 or np.any(weights < 0):
        raise ValidationError("mixture weights must be nonnegative and sum to 1")
    stacked = np.column_stack(
        [np.asarray(v, dtype=complex).reshape(-1) for v in vectors]
    )
    freqs = np.atleast_1d(np.asarray(freqs, dtype=float))
    if dim is None:
        dim = round(stacked.shape[0] ** (1.0 / freqs.size))
    return TruncatedDensityMatrix(
        dim=dim, freqs=freqs, weights=weights.copy(), vectors=stacked
    )


def fock_state(ns, freqs, dim: int) -> TruncatedDensityMatrix:
    """|n> or |n_a, n_b> as a truncated pure state."""
    ns = tuple(np.atleast_1d(ns).astype(int))
    freqs = np.atleast_1d(np.asarray(freqs, dtype=float))
    size = dim ** freqs.size
    idx = 0
    for n in ns:
        if not 0 <= n < dim:
            raise ValidationError(f"occupation {n} outside cutoff {dim}")
        idx = idx * dim + n
    v = np.zeros(size, dtype=complex)
    v[idx] = 1.0
    return pure_state(v, freqs, dim)


def thermal_fock_state(mean_occupations, freqs, dim: int) -> TruncatedDensityMatrix:
    """Product of truncated thermal modes, renormalized over the cutoff.

    Stored as weighted number-basis components; weights below 1e-16 of the
    total are dropped and booked as leak.
    """
    freqs = np.atleast_1d(np.asarray(freqs, dtype=float))
    occs = np.broadcast_to(
        np.asarray(mean_occupations, dtype=float), freqs.shape
    )
    pops = []
    for m in occs:
        if m < 0:
            raise ValidationError("mean occupation must be nonnegative")
        if m == 0:
            p = np.zeros(dim)
            p[0] = 1.0
        else:
            q = m / (m + 1.0)
            p = (1.0 - q) * q ** np.arange(dim)
            p /= p.sum()
        pops.append(p)
    diag = pops[0] if len(pops) == 1 else np.kron(pops[0], pops[1])
    keep = np.flatnonzero(diag > 1e-16)
    dropped = float(diag[diag <= 1e-16].sum())
    vectors = np.zeros((diag.size, keep.size), dtype=complex)
    vectors[keep, np.arange(keep.size)] = 1.0
    return TruncatedDensityMatrix(
        dim=dim,
        freqs=freqs,
        weights=diag[keep].copy(),
        vectors=vectors,
        leak=dropped,
    )


def _occupations(dim: int, n_modes: int) -> list[np.ndarray]:
    """Occupation number of each mode as a flat vector over the kron basis."""
    idx = np.arange(dim**n_modes)
    if n_modes == 1:
        return [idx.astype(float)]
    return [(idx // dim).astype(float), (idx % dim).astype(float)]


def _population_diagonal(rho: TruncatedDensityMatrix) -> np.ndarray:
    if rho.weights is not None:
        return (np.abs(rho.vectors) ** 2) @ rho.weights
    return np.real(np.diag(rho.matrix)).copy()


def _tail_measure(rho: TruncatedDensityMatrix) -> float:
    """Largest per-mode population in the top two cutoff levels, plus leak."""
    diag = _population_diagonal(rho)
    worst = 0.0
    for occ in _occupations(rho.dim, rho.n_modes):
        worst = max(worst, float(diag[occ >= rho.dim - 2].sum()))
    return worst + rho.leak


def _require_tail(rho: TruncatedDensityMatrix, where: str) -> None:
    tail = _tail_measure(rho)
    if tail > TAIL_ERROR:
        raise TruncationError(
            f"{where}: tail population {tail:.3e} exceeds {TAIL_ERROR}"
        )
    if tail > TAIL_WARN:
        warnings.warn(
            f"{where}: tail population {tail:.3e} may bias results",
            TruncationWarning,
            stacklevel=3,
        )


def _quadratures(dim: int, n_modes: int) -> list[scipy.sparse.spmatrix]:
    """Sparse quadrature operators ordered (x_1, p_1, ..., x_N, p_N)."""
    a = scipy.sparse.csr_matrix(ladder(dim))
    eye = scipy.sparse.identity(dim, format="csr")
    out = []
    for m in range(n_modes):
        if n_modes == 1:
            am = a
        elif m == 0:
            am = scipy.sparse.kron(a, eye, format="csr")
        else:
            am = scipy.sparse.kron(eye, a, format="csr")
        out.append(((am + am.getH()) / _SQRT2).tocsr())
        out.append((-1j * (am - am.getH()) / _SQRT2).tocsr())
    return out


def moments_of(rho: TruncatedDensityMatrix) -> tuple[np.ndarray, np.ndarray]:
    """First moments and covariance of an oracle state, with tail checks."""
    _require_tail(rho, "moments_of")
    quads = _quadratures(rho.dim, rho.n_modes)
    k = len(quads)
    x = np.zeros(k)
    second = np.zeros((k, k))
    if rho.weights is not None:
        w, v = rho.weights, rho.vectors
        images = [q @ v for q in quads]
        for i in range(k):
            x[i] = float(np.real(np.sum(np.conj(v) * images[i] * w)))
        for i in range(k):
            for j in range(i, k):
                val = float(np.real(np.sum(np.conj(images[i]) * images[j] * w)))
                second[i, j] = second[j, i] = val
    else:
        rho_t = rho.matrix.T
        for i, Xi in enumerate(quads):
            x[i] = float(np.real((Xi.multiply(rho_t)).sum()))
        for i in range(k):
            for j in range(i, k):
                M = (quads[i] @ quads[j]).tocsr()
                val = float(np.real((M.multiply(rho_t)).sum()))
                second[i, j] = second[j, i] = val
    cov = 2.0 * second - 2.0 * np.outer(x, x)
    return x, cov


def energy_of(rho: TruncatedDensityMatrix) -> float:
    """Mean energy sum_m omega_m <n_m>."""
    _require_tail(rho, "energy_of")
    diag = _population_diagonal(rho)
    total = 0.0
    for w, occ in zip(rho.freqs, _occupations(rho.dim, rho.n_modes)):
        total += w * float(diag @ occ)
    return total


def entropy_of(rho: TruncatedDensityMatrix) -> float:
    """Von Neumann entropy -sum p ln p of the truncated matrix."""
    eigs = np.linalg.eigvalsh(rho.dense())
    eigs = eigs[eigs > 1e-15]
    return float(-np.sum(eigs * np.log(eigs)))


def ergotropy_of(rho: TruncatedDensityMatrix) -> float:
    """Energy above the passive arrangement of the same eigenvalues."""
    _require_tail(rho, "ergotropy_of")
    eigs = np.sort(np.linalg.eigvalsh(rho.dense()))[::-1]
    levels = np.zeros(rho.dim**rho.n_modes)
    for w, occ in zip(rho.freqs, _occupations(rho.dim, rho.n_modes)):
        levels += w * occ
    levels = np.sort(levels)
    passive_energy = float(np.clip(eigs, 0.0, None) @ levels)
    return energy_of(rho) - passive_energy


def _single_mode_unitary(kind: str, params: dict, dim: int) -> np.ndarray:
    a = ladder(dim)
    ad = a.T
    if kind == "rotation":
        return np.diag(np.exp(-1j * params["theta"] * np.arange(dim)))
    if kind == "squeeze":
        r = params["r"]
        return scipy.linalg.expm(0.5 * r * (a @ a - ad @ ad)).astype(complex)
    if kind == "displacement":
        alpha = params["alpha"]
        return scipy.linalg.expm(alpha * ad - np.conj(alpha) * a)
    raise ValidationError(f"unsupported single-mode kind {kind!r}")


def _tms_sparse(r: float, dim: int) -> scipy.sparse.csr_matrix:
    """exp[r (a'b' - ab)] assembled per photon-number-difference sector."""
    rows, cols, vals = [], [], []
    for d in range(-(dim - 1), dim):
        count = dim - abs(d)
        if d >= 0:
            idx = [(k + d) * dim + k for k in range(count)]
        else:
            idx = [k * dim + (k - d) for k in range(count)]
        g = np.zeros((count, count))
        for t in range(count - 1):
            na, nb = divmod(idx[t], dim)
            amp = r * math.sqrt((na + 1) * (nb + 1))
            g[t + 1, t] = amp
            g[t, t + 1] = -amp
        u = scipy.linalg.expm(g)
        for t1 in range(count):
            for t2 in range(count):
                rows.append(idx[t1])
                cols.append(idx[t2])
                vals.append(u[t1, t2])
    size = dim * dim
    return scipy.sparse.csr_matrix(
        (np.asarray(vals, dtype=complex), (rows, cols)), shape=(size, size)
    )


def _bs_sparse(theta: float, dim: int) -> scipy.sparse.csr_matrix:
    """Mode-b parity times exp[theta (a'b - ab')], per total-number sector."""
    rows, cols, vals = [], [], []
    for total in range(0, 2 * dim - 1):
        lo = max(0, total - (dim - 1))
        hi = min(total, dim - 1)
        nas = list(range(lo, hi + 1))
        idx = [na * dim + (total - na) for na in nas]
        count = len(idx)
        g = np.zeros((count, count))
        for t in range(count - 1):
            na = nas[t]
            nb = total - na
            amp = theta * math.sqrt((na + 1) * nb)
            g[t + 1, t] = amp
            g[t, t + 1] = -amp
        u = scipy.linalg.expm(g)
        for t1 in range(count):
            parity = -1.0 if (total - nas[t1]) % 2 else 1.0
            for t2 in range(count):
                rows.append(idx[t1])
                cols.append(idx[t2])
                vals.append(parity * u[t1, t2])
    size = dim * dim
    return scipy.sparse.csr_matrix(
        (np.asarray(vals, dtype=complex), (rows, cols)), shape=(size, size)
    )


def _sparse_unitary(op: GaussianOp, dim: int) -> scipy.sparse.csr_matrix:
    """The truncated unitary for an elementary op at the given cutoff."""
    n = op.n_modes
    if n not in (1, 2):
        raise ValidationError("oracle unitaries support one or two modes")
    if op.kind == "displacement":
        blocks = []
        for m in range(n):
            dx, dp = op.d[2 * m], op.d[2 * m + 1]
            alpha = complex(dx, dp) / _SQRT2
            blocks.append(_single_mode_unitary("displacement", {"alpha": alpha}, dim))
        u = blocks[0]
        if n == 2:
            u = scipy.sparse.kron(
                scipy.sparse.csr_matrix(blocks[0]),
                scipy.sparse.csr_matrix(blocks[1]),
                format="csr",
            )
            return u
        return scipy.sparse.csr_matrix(u)
    if op.kind in ("rotation", "squeeze"):
        u = _single_mode_unitary(op.kind, op.params, dim)
        us = scipy.sparse.csr_matrix(u)
        if n == 1:
            return us
        eye = scipy.sparse.identity(dim, format="csr")
        mode = op.modes[0]
        if mode == 0:
            return scipy.sparse.kron(us, eye, format="csr")
        return scipy.sparse.kron(eye, us, format="csr")
    if op.kind == "two_mode_squeeze":
        u = _tms_sparse(op.params["r"], dim)
        if op.modes == (1, 0):
            u = _swap_modes(u, dim)
        return u
    if op.kind == "beam_splitter":
        u = _bs_sparse(op.params["theta"], dim)
        if op.modes == (1, 0):
            u = _swap_modes(u, dim)
        return u
    raise ValidationError(f"operation kind {op.kind!r} has no oracle unitary")


def _swap_modes(u: scipy.sparse.csr_matrix, dim: int) -> scipy.sparse.csr_matrix:
    perm = (np.arange(dim * dim).reshape(dim, dim).T).reshape(-1)
    return u.tocsr()[perm, :][:, perm]


def _keep_indices(dim_small: int, dim_big: int, n_modes: int) -> np.ndarray:
    if n_modes == 1:
        return np.arange(dim_small)
    grid = np.arange(dim_small)[:, None] * dim_big + np.arange(dim_small)[None, :]
    return grid.reshape(-1)


def gaussian_unitary_matrix(op: GaussianOp, dim: int) -> np.ndarray:
    """Truncated unitary at the requested cutoff.

    Built in an enlarged internal space (1.5x, at least +10 levels) and
    projected back down, so matrix elements within the cutoff are accurate
    for low-energy states.  Raises when the cutoff is too small for the
    parameter magnitude (measured by mass the vacuum image loses to the
    discarded levels).
    """
    _check_dim(dim)
    dim_int = _internal_dim(dim)
    u = _sparse_unitary(op, dim_int)
    keep = _keep_indices(dim, dim_int, op.n_modes)
    projected = np.asarray(u[keep, :][:, keep].todense())
    vacuum_loss = 1.0 - float(np.sum(np.abs(projected[:, 0]) ** 2))
    if vacuum_loss > TAIL_ERROR:
        raise TruncationError(
            f"cutoff {dim} too small for {op.kind} with params {op.params} "
            f"(vacuum image loses {vacuum_loss:.3e} of its mass)"
        )
    return projected


def _embed_stack(v: np.ndarray, dim: int, dim_int: int, n_modes: int) -> np.ndarray:
    """Pad a stack of column vectors from dim^n to dim_int^n levels."""
    r = v.shape[1]
    if n_modes == 1:
        out = np.zeros((dim_int, r), dtype=complex)
        out[:dim] = v
        return out
    out = np.zeros((dim_int, dim_int, r), dtype=complex)
    out[:dim, :dim] = v.reshape(dim, dim, r)
    return out.reshape(dim_int * dim_int, r)


def _project_stack(v: np.ndarray, dim: int, dim_int: int, n_modes: int) -> np.ndarray:
    if n_modes == 1:
        return np.ascontiguousarray(v[:dim])
    r = v.shape[1]
    return np.ascontiguousarray(
        v.reshape(dim_int, dim_int, r)[:dim, :dim].reshape(dim * dim, r)
    )


def apply_gaussian_unitary(
    op: GaussianOp, rho: TruncatedDensityMatrix
) -> TruncatedDensityMatrix:
    """Conjugate an oracle state by the op's unitary in the enlarged space."""
    if op.n_modes != rho.n_modes:
        raise ValidationError("operation and state mode counts differ")
    dim = rho.dim
    dim_int = _internal_dim(dim)
    u = _sparse_unitary(op, dim_int)
    weights, vectors = rho._component_parts()
    big = u @ _embed_stack(vectors, dim, dim_int, rho.n_modes)
    small = _project_stack(big, dim, dim_int, rho.n_modes)
    kept_mass = float(np.sum(weights * np.sum(np.abs(small) ** 2, axis=0)))
    leak = max(0.0, 1.0 - rho.leak - kept_mass)
    return TruncatedDensityMatrix(
        dim=dim,
        freqs=rho.freqs,
        weights=weights.copy(),
        vectors=small,
        leak=rho.leak + leak,
    )


class _BudgetExhausted(Exception):
    pass


def _rotation2(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, s], [-s, c]])


def _family_symplectic(p: np.ndarray) -> np.ndarray:
    """The ten-parameter search family: local, local, squeeze, realign, split."""
    t1, r1, f1, t2, r2, f2, rt, u1, u2, tb = p
    l1 = _rotation2(t1) @ np.diag([math.exp(-r1), math.exp(r1)]) @ _rotation2(f1)
    l2 = _rotation2(t2) @ np.diag([math.exp(-r2), math.exp(r2)]) @ _rotation2(f2)
    s = np.zeros((4, 4))
    s[:2, :2] = l1
    s[2:, 2:] = l2
    ch, sh = math.cosh(rt), math.sinh(rt)
    sz = np.array([[1.0, 0.0], [0.0, -1.0]])
    tms = np.block([[ch * np.eye(2), sh * sz], [sh * sz, ch * np.eye(2)]])
    s = tms @ s
    re = np.zeros((4, 4))
    re[:2, :2] = _rotation2(u1)
    re[2:, 2:] = _rotation2(u2)
    s = re @ s
    c, sn = math.cos(tb), math.sin(tb)
    bs = np.block([[c * np.eye(2), sn * np.eye(2)], [sn * np.eye(2), -c * np.eye(2)]])
    return bs @ s


def brute_force_min_energy(
    state: MomentState,
    seed: int = 1234,
    starts: int = 16,
    maxfev: int = 1500,
    budget: int | None = None,
) -> float:
    """Direct-search floor for the Gaussian-reachable energy of a two-mode state.

    Runs seeded multi-start Nelder-Mead over a ten-parameter family of
    symplectics (two general local operations, a two-mode squeeze, two
    realigning rotations, a beam splitter) after zeroing the first moments.
    Exceeding the evaluation budget returns best-so-far with a warning.
    """
    if state.n_modes != 2:
        raise ValidationError("brute_force_min_energy expects a two-mode state")
    if starts < 1:
        raise ValidationError("need at least one start")
    cov = state.cov
    w = state.freqs
    evals = 0

    def objective(p):
        nonlocal evals
        if budget is not None and evals >= budget:
            raise _BudgetExhausted
        evals += 1
        s = _family_symplectic(p)
        g = s @ cov @ s.T
        return (
            w[0] * (g[0, 0] + g[1, 1] - 2.0) + w[1] * (g[2, 2] + g[3, 3] - 2.0)
        ) / 4.0

    rng = np.random.default_rng(seed)
    points = [np.zeros(10)]
    for _ in range(starts - 1):
        p0 = rng.uniform(-1.0, 1.0, 10)
        p0[[0, 2, 3, 5, 7, 8, 9]] *= math.pi
        points.append(p0)

    best = math.inf
    best_x = points[0]
    exhausted = False
    for p0 in points:
        try:
            res = minimize(
                objective,
                p0,
                method="Nelder-Mead",
                options={"maxfev": maxfev, "fatol": 1e-12, "xatol": 1e-10},
            )
        except _BudgetExhausted:
            exhausted = True
            break
        if res.fun < best:
            best, best_x = float(res.fun), res.x
    if not exhausted:
        try:
            res = minimize(
                objective,
                best_x,
                method="Nelder-Mead",
                options={"maxfev": maxfev, "fatol": 1e-14, "xatol": 1e-12},
            )
            if res.fun < best:
                best = float(res.fun)
        except _BudgetExhausted:
            exhausted = True
    if exhausted:
        warnings.warn(
            f"evaluation budget {budget} exhausted; returning best-so-far",
            BudgetWarning,
            stacklevel=2,
        )
    return best
