"""Left and right quantum discord of the encoded three-qubit state.

The data qubit (qubit 1) is one party and the ancilla pair (qubits 2, 3) the
other. Left discord measures the data qubit with ``{|±m⟩}`` and minimises the
conditional entropy over the unit sphere; right discord measures the ancillae
with a product projective measurement.

Sphere minimisation is a coarse (θ, φ) grid followed by Nelder-Mead
refinement started from the best grid cells.
"""
from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from mixedqec.core import (
    bloch_to_density,
    check_density_matrix,
    entropy_of_spectrum,
    partial_trace,
    projector,
    von_neumann_entropy,
)
from mixedqec.qec import codeword, encode

EMPTY_BRANCH = 1e-14
CLAMP_TOL = 1e-9
DEFAULT_GRID = (64, 128)
DEFAULT_STARTS = 5
MIN_MAP_GRID = (16, 32)
#: largest left discord over pure data states, reached on the cube diagonals
MAX_LEFT_DISCORD = 0.75 * math.log2(3) - 0.5

#: the eight sign patterns (±, ±, ±)
SIGNS = np.array([[a, b, c] for a in (1, -1) for b in (1, -1) for c in (1, -1)], dtype=float)

_NM_OPTIONS = {"xatol": 1e-10, "fatol": 1e-12, "maxiter": 4000, "maxfev": 8000}


@dataclass(frozen=True)
class MeasurementDirection:
    """Unit vector ``m`` defining the projective measurement ``{|+m⟩, |-m⟩}``."""

    m: tuple[float, float, float]

    def __post_init__(self) -> None:
        m = tuple(float(x) for x in self.m)
        if len(m) != 3 or abs(math.hypot(*m) - 1) > 1e-12:
            raise ValueError(f"measurement direction must be a unit 3-vector, got {m}")
        object.__setattr__(self, "m", m)

    @classmethod
    def from_angles(cls, theta: float, phi: float) -> "MeasurementDirection":
        return cls(tuple(sphere_point(theta, phi)))

    @property
    def theta(self) -> float:
        return math.acos(max(-1.0, min(1.0, self.m[2])))

    @property
    def phi(self) -> float:
        return math.atan2(self.m[1], self.m[0]) % (2 * math.pi)

    def projector(self, sign: int) -> np.ndarray:
        return projector(self.m, sign)


@dataclass(frozen=True)
class ProductMeasurement:
    """``|±a⟩⊗|±b⟩`` on ancilla qubits 2 and 3."""

    a: MeasurementDirection
    b: MeasurementDirection

    def projectors(self) -> list[tuple[tuple[int, int], np.ndarray]]:
        return [
            ((s, t), np.kron(self.a.projector(s), self.b.projector(t)))
            for s in (1, -1)
            for t in (1, -1)
        ]


X_HAT = MeasurementDirection((1.0, 0.0, 0.0))
Z_HAT = MeasurementDirection((0.0, 0.0, 1.0))
#: the ancilla measurement that block-diagonalises every codeword
PI_PLUS_MINUS = ProductMeasurement(X_HAT, Z_HAT)


@dataclass
class Minimum:
    value: float
    argmin: np.ndarray
    grid: tuple[int, int]
    iterations: int


@dataclass
class DiscordResult:
    """Discord in bits; ``raw_value`` is the unclamped number."""

    value: float
    raw_value: float
    argmin: MeasurementDirection | ProductMeasurement
    grid: tuple[int, ...] | None = None
    iterations: int = 0


@dataclass
class DiscordMapDataset:
    theta: np.ndarray
    phi: np.ndarray
    value: np.ndarray
    grid: tuple[int, int]
    metadata: dict = field(default_factory=dict)

    def rows(self) -> list[tuple[float, float, float]]:
        return list(zip(self.theta.tolist(), self.phi.tolist(), self.value.tolist()))


def sphere_point(theta: float, phi: float) -> np.ndarray:
    st = math.sin(theta)
    return np.array([st * math.cos(phi), st * math.sin(phi), math.cos(theta)])


def sphere_grid(n_theta: int, n_phi: int) -> tuple[np.ndarray, np.ndarray]:
    """Flattened (θ, φ) grid: θ spans [0, π] inclusive, φ spans [0, 2π) exclusive.

    With an even ``n_phi`` every grid point's antipode is also a grid point.
    """
    theta = np.linspace(0.0, np.pi, n_theta)
    phi = 2 * np.pi * np.arange(n_phi) / n_phi
    tt, pp = np.meshgrid(theta, phi, indexing="ij")
    return tt.ravel(), pp.ravel()


def sphere_directions(theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
    st = np.sin(theta)
    return np.stack([st * np.cos(phi), st * np.sin(phi), np.cos(theta)], axis=-1)


# -- conditional states and entropies -------------------------------------------


def conditional_state_given_data(
    rho3: np.ndarray, m: MeasurementDirection, sign: int
) -> tuple[float, np.ndarray | None]:
    """Outcome probability and post-measurement ancilla state for ``|±m⟩``.

    Returns ``(p, None)`` when ``p`` is below ``1e-14``.
    """
    proj = np.kron(m.projector(sign), np.eye(4))
    unnorm = partial_trace(proj @ rho3, [2, 3])
    p = float(np.trace(unnorm).real)
    if p <= EMPTY_BRANCH:
        return p, None
    return p, unnorm / p


def conditional_entropy_numeric(rho3: np.ndarray, m: MeasurementDirection) -> float:
    """``Σ± p± S(ρ_{2|±})`` from explicit projection and diagonalisation."""
    total = 0.0
    for sign in (1, -1):
        p, rho = conditional_state_given_data(rho3, m, sign)
        if rho is not None:
            total += p * von_neumann_entropy(rho)
    return total


def _batched_conditional_entropy(rho3: np.ndarray, ms: np.ndarray) -> np.ndarray:
    """Vectorised :func:`conditional_entropy_numeric` over directions ``ms`` (K, 3)."""
    r = rho3.reshape(2, 4, 2, 4)
    total = np.zeros(len(ms))
    for sign in (1, -1):
        proj = 0.5 * (
            np.eye(2)[None]
            + sign
            * (
                ms[:, 0, None, None] * np.array([[0, 1], [1, 0]])
                + ms[:, 1, None, None] * np.array([[0, -1j], [1j, 0]])
                + ms[:, 2, None, None] * np.array([[1, 0], [0, -1]])
            )
        )
        unnorm = np.einsum("kba,aibj->kij", proj, r)
        eigs = np.linalg.eigvalsh(unnorm)  # eigenvalues of p·ρ
        p = eigs.sum(axis=1)
        eigs = np.clip(eigs, 0, None)
        with np.errstate(divide="ignore", invalid="ignore"):
            plogp = np.where(eigs > 0, eigs * np.log2(eigs), 0.0).sum(axis=1)
            plog_norm = np.where(p > EMPTY_BRANCH, p * np.log2(np.where(p > 0, p, 1)), 0.0)
        # p·S(ρ/p) = -Σ λ log λ + p log p
        total += np.where(p > EMPTY_BRANCH, -plogp + plog_norm, 0.0)
    return total


def _xlog2x(x: np.ndarray) -> np.ndarray:
    x = np.clip(x, 0, None)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(x > 0, x * np.log2(np.where(x > 0, x, 1)), 0.0)


def conditional_entropy_closed_form(n, m) -> float:
    """``2 - (1/8) Σ_j (1 + n·n_j) log2(1 + n·n_j)`` with ``n_j = (±m_x, ±m_y, ±m_z)``.

    Valid only for the codeword with maximally mixed ancillae.
    """
    n = np.asarray(n, dtype=float)
    m = np.asarray(m.m if isinstance(m, MeasurementDirection) else m, dtype=float)
    return float(2 - _xlog2x(1 + SIGNS @ (n * m)).sum() / 8)


def _closed_form_batch(n: np.ndarray, ms: np.ndarray) -> np.ndarray:
    return 2 - _xlog2x(1 + (ms * n) @ SIGNS.T).sum(axis=1) / 8


def _closed_form_fast(nx: float, ny: float, nz: float, theta: float, phi: float) -> float:
    st = math.sin(theta)
    a = nx * st * math.cos(phi)
    b = ny * st * math.sin(phi)
    c = nz * math.cos(theta)
    acc = 0.0
    for v in (a + b + c, a + b - c, a - b + c, a - b - c):
        for x in (1 + v, 1 - v):
            if x > 0:
                acc += x * math.log2(x)
    return 2 - acc / 8


# -- sphere minimisation -----------------------------------------------------------


def _refine(
    scalar: Callable[[np.ndarray], float],
    batch: Callable[[np.ndarray], np.ndarray],
    grid: tuple[int, int],
    starts: int,
    theta_range: tuple[float, float] = (0.0, math.pi),
    phi_range: tuple[float, float] | None = None,
) -> Minimum:
    n_theta, n_phi = grid
    theta = np.linspace(*theta_range, n_theta)
    if phi_range is None:
        phi = 2 * np.pi * np.arange(n_phi) / n_phi
    else:
        phi = np.linspace(*phi_range, n_phi)
    tt, pp = (a.ravel() for a in np.meshgrid(theta, phi, indexing="ij"))
    values = batch(sphere_directions(tt, pp))
    order = np.argsort(values, kind="stable")
    best_val = float(values[order[0]])
    best_x = np.array([tt[order[0]], pp[order[0]]])
    iterations = 0
    for idx in order[:starts]:
        res = minimize(
            lambda x: scalar(sphere_point(x[0], x[1])),
            np.array([tt[idx], pp[idx]]),
            method="Nelder-Mead",
            options=_NM_OPTIONS,
        )
        iterations += int(res.nit)
        if res.fun < best_val:
            best_val, best_x = float(res.fun), res.x
    return Minimum(best_val, sphere_point(*best_x), (n_theta, n_phi), iterations)


def minimize_conditional_entropy(
    rho3: np.ndarray,
    grid: tuple[int, int] = DEFAULT_GRID,
    starts: int = DEFAULT_STARTS,
) -> Minimum:
    """``min_m S_{±m}(2|1)`` for an arbitrary three-qubit state."""
    rho3 = check_density_matrix(rho3)
    return _refine(
        lambda m: conditional_entropy_numeric(rho3, MeasurementDirection(m / np.linalg.norm(m))),
        lambda ms: _batched_conditional_entropy(rho3, ms),
        grid,
        starts,
    )


def minimize_closed_form(n, grid: tuple[int, int] = (9, 9), starts: int = 2) -> Minimum:
    """Minimise the codeword's closed-form conditional entropy.

    The objective depends on ``m`` only through ``|m_x|, |m_y|, |m_z|``, so the
    search is confined to the positive octant.
    """
    nx, ny, nz = (float(v) for v in n)
    n_arr = np.array([nx, ny, nz])
    return _refine(
        lambda m: _closed_form_fast(nx, ny, nz, *_angles(m)),
        lambda ms: _closed_form_batch(n_arr, ms),
        grid,
        starts,
        theta_range=(0.0, math.pi / 2),
        phi_range=(0.0, math.pi / 2),
    )


def _angles(m: np.ndarray) -> tuple[float, float]:
    return math.acos(max(-1.0, min(1.0, m[2]))), math.atan2(m[1], m[0])


def _clamp(raw: float) -> float:
    return 0.0 if -CLAMP_TOL <= raw < 0 else raw


# -- discord --------------------------------------------------------------------------


def left_discord(
    n, grid: tuple[int, int] = DEFAULT_GRID, starts: int = DEFAULT_STARTS
) -> DiscordResult:
    """``D(2:1) = S(ρ̃1) - S(ρ̃3) + min_m S_{±m}(2|1)`` for the mixed-ancilla codeword."""
    rho3 = codeword(n)
    best = minimize_conditional_entropy(rho3, grid, starts)
    raw = von_neumann_entropy(partial_trace(rho3, [1])) - von_neumann_entropy(rho3) + best.value
    return DiscordResult(_clamp(raw), raw, MeasurementDirection(best.argmin), grid, best.iterations)


def left_discord_fast(n, grid: tuple[int, int] = (9, 9), starts: int = 2) -> float:
    """Left discord of the mixed-ancilla codeword through the closed-form entropy.

    ``S(ρ̃1) = 1`` and ``S(ρ̃3) = 2 + S(ρ1)``, so ``D = min S(2|1) - 1 - S(ρ1)``.
    """
    # the value depends only on |n_x|, |n_y|, |n_z|; canonicalise so that
    # sign-flipped inputs give bit-identical results
    n = np.abs(np.asarray(n, dtype=float))
    r = float(np.linalg.norm(n))
    s1 = entropy_of_spectrum([(1 + r) / 2, (1 - r) / 2])
    return _clamp(minimize_closed_form(n, grid, starts).value - 1 - s1)


def conditional_state_given_ancillae(
    rho3: np.ndarray, proj: np.ndarray
) -> tuple[float, np.ndarray | None]:
    unnorm = partial_trace(np.kron(np.eye(2), proj) @ rho3, [1])
    p = float(np.trace(unnorm).real)
    if p <= EMPTY_BRANCH:
        return p, None
    return p, unnorm / p


def conditional_entropy_given_ancillae(rho3: np.ndarray, meas: ProductMeasurement) -> float:
    """``Σ p_{±±} S(ρ_{1|±±})`` for a product measurement on the ancillae."""
    total = 0.0
    for _, proj in meas.projectors():
        p, rho = conditional_state_given_ancillae(rho3, proj)
        if rho is not None:
            total += p * von_neumann_entropy(rho)
    return total


def right_discord(n, meas: ProductMeasurement = PI_PLUS_MINUS) -> DiscordResult:
    """``D(1:2)`` evaluated with the ancilla measurement ``|±x̂, ±ẑ⟩``.

    That measurement leaves every conditional data state with the same Bloch
    length as ``n``, so the value is zero; discord is nonnegative, so no further
    search is needed.
    """
    rho3 = codeword(n)
    raw = (
        von_neumann_entropy(partial_trace(rho3, [2, 3]))
        - von_neumann_entropy(rho3)
        + conditional_entropy_given_ancillae(rho3, meas)
    )
    return DiscordResult(_clamp(raw), raw, meas)


def block_diagonal_decomposition(rho3: np.ndarray, meas: ProductMeasurement = PI_PLUS_MINUS):
    """Rebuild ``Σ p_{±±} ρ_{1|±±} ⊗ Π_{±±}``; equals ``rho3`` iff it is block diagonal."""
    out = np.zeros((8, 8), dtype=complex)
    for _, proj in meas.projectors():
        p, rho = conditional_state_given_ancillae(rho3, proj)
        if rho is not None:
            out += p * np.kron(rho, proj)
    return out


def _batched_given_ancillae(rho3: np.ndarray, angles: np.ndarray) -> np.ndarray:
    """Conditional entropy for product measurements given as rows (θa, φa, θb, φb)."""
    r = rho3.reshape(2, 4, 2, 4)
    a = sphere_directions(angles[:, 0], angles[:, 1])
    b = sphere_directions(angles[:, 2], angles[:, 3])
    pauli = np.array([[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]])
    total = np.zeros(len(angles))
    for s in (1, -1):
        pa = 0.5 * (np.eye(2)[None] + s * np.einsum("kc,cij->kij", a, pauli))
        for t in (1, -1):
            pb = 0.5 * (np.eye(2)[None] + t * np.einsum("kc,cij->kij", b, pauli))
            proj = np.einsum("kij,kab->kiajb", pa, pb).reshape(-1, 4, 4)
            unnorm = np.einsum("kji,aibj->kab", proj, r)
            eigs = np.clip(np.linalg.eigvalsh(unnorm), 0, None)
            p = eigs.sum(axis=1)
            ent = -_xlog2x(eigs).sum(axis=1) + _xlog2x(p)
            total += np.where(p > EMPTY_BRANCH, ent, 0.0)
    return total


def minimize_product_measurement(
    rho3: np.ndarray, grid: tuple[int, int] = (5, 8), starts: int = 3
) -> tuple[float, ProductMeasurement]:
    """Coarse grid over both ancilla directions, then 4-D Nelder-Mead."""
    theta, phi = sphere_grid(*grid)
    ia, ib = np.meshgrid(np.arange(len(theta)), np.arange(len(theta)), indexing="ij")
    ia, ib = ia.ravel(), ib.ravel()
    angles = np.stack([theta[ia], phi[ia], theta[ib], phi[ib]], axis=1)
    values = _batched_given_ancillae(rho3, angles)
    order = np.argsort(values, kind="stable")
    best_val, best_x = float(values[order[0]]), angles[order[0]]
    for idx in order[:starts]:
        res = minimize(
            lambda x: float(_batched_given_ancillae(rho3, x[None])[0]),
            angles[idx],
            method="Nelder-Mead",
            options=_NM_OPTIONS,
        )
        if res.fun < best_val:
            best_val, best_x = float(res.fun), res.x
    meas = ProductMeasurement(
        MeasurementDirection(sphere_point(best_x[0], best_x[1])),
        MeasurementDirection(sphere_point(best_x[2], best_x[3])),
    )
    return best_val, meas


@dataclass
class PureAncillaDiscord:
    left: DiscordResult
    right: DiscordResult
    entanglement_entropy: float
    #: ``2 - (1-n_z)log2(1-n_z) - (1+n_z)log2(1+n_z)``; twice the entanglement
    #: entropy, kept for comparison only
    unnormalized_expression: float


def pure_ancilla_discord(n, grid: tuple[int, int] = DEFAULT_GRID) -> PureAncillaDiscord:
    """Left and right discord when the ancillae start in ``|00⟩``."""
    ancilla = np.zeros((4, 4), dtype=complex)
    ancilla[0, 0] = 1
    rho3 = encode(bloch_to_density(n), ancilla)
    s3 = von_neumann_entropy(rho3)
    s1 = von_neumann_entropy(partial_trace(rho3, [1]))
    s2 = von_neumann_entropy(partial_trace(rho3, [2, 3]))

    best = minimize_conditional_entropy(rho3, grid)
    raw_left = s1 - s3 + best.value
    cond, meas = minimize_product_measurement(rho3)
    raw_right = s2 - s3 + cond

    nz = float(n[2])
    printed = 2 - float(_xlog2x(np.array([1 - nz, 1 + nz])).sum())
    return PureAncillaDiscord(
        left=DiscordResult(_clamp(raw_left), raw_left, MeasurementDirection(best.argmin), grid, best.iterations),
        right=DiscordResult(_clamp(raw_right), raw_right, meas),
        entanglement_entropy=s1,
        unnormalized_expression=printed,
    )


def discord_surface(n, grid: tuple[int, int] = (32, 64)) -> DiscordMapDataset:
    """``S(ρ̃1) - S(ρ̃3) + S_{±m}(2|1)`` for every grid direction ``m``."""
    rho3 = codeword(n)
    offset = von_neumann_entropy(partial_trace(rho3, [1])) - von_neumann_entropy(rho3)
    theta, phi = sphere_grid(*grid)
    values = offset + _batched_conditional_entropy(rho3, sphere_directions(theta, phi))
    return DiscordMapDataset(theta, phi, values, grid, {"n": [float(v) for v in n]})


def discord_map(
    grid: tuple[int, int] = DEFAULT_GRID,
    inner_grid: tuple[int, int] = (9, 9),
    starts: int = 2,
) -> DiscordMapDataset:
    """``D(2:1)`` for pure data states ``n(θ, φ)`` over a sphere grid."""
    if grid[0] < MIN_MAP_GRID[0] or grid[1] < MIN_MAP_GRID[1]:
        raise ValueError(f"grid {grid} below minimum {MIN_MAP_GRID}")
    theta, phi = sphere_grid(*grid)
    ns = sphere_directions(theta, phi)
    # sign flips of n map grid points onto grid points, so evaluate each
    # |n|-orbit once
    keys = [tuple(np.round(np.abs(n), 12)) for n in ns]
    cache: dict[tuple, float] = {}
    for key in keys:
        if key not in cache:
            cache[key] = left_discord_fast(key, inner_grid, starts)
    values = np.array([cache[k] for k in keys])
    return DiscordMapDataset(
        theta,
        phi,
        values,
        grid,
        {"inner_grid": list(inner_grid), "starts": starts, "objective": "closed-form"},
    )


