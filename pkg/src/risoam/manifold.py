"""Riemannian conjugate gradient on the product of unit circles.

Points are complex vectors with unit-modulus entries; the metric is the real
inner product Re{x^H y}. Tangent projection, transport and the normalization
retraction are all elementwise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class RetractionSingularityError(ValueError):
    """A retraction argument has a zero entry, so normalization is undefined."""


@dataclass(frozen=True)
class RcgConfig:
    grad_tolerance: float = 1e-6
    max_iters: int = 500
    armijo_initial_step: float = 1.0
    armijo_contraction: float = 0.5
    armijo_slope: float = 1e-4
    max_backtracks: int = 50
    restart_on_nondescent: bool = True

    def __post_init__(self):
        if self.grad_tolerance <= 0 or self.armijo_initial_step <= 0:
            raise ValueError("tolerances and steps must be positive")
        if not (0 < self.armijo_contraction < 1 and 0 < self.armijo_slope < 1):
            raise ValueError("Armijo parameters must lie in (0, 1)")


@dataclass
class RcgResult:
    point: np.ndarray
    trace: np.ndarray
    iterations: int
    grad_norm: float
    stalled: bool


def inner(x: np.ndarray, y: np.ndarray) -> float:
    """Riemannian metric Re{x^H y}."""
    return float(np.real(np.vdot(x, y)))


def riemannian_grad(point: np.ndarray, egrad: np.ndarray) -> np.ndarray:
    """Project the Euclidean gradient onto the tangent space at `point`."""
    return egrad - np.real(egrad * np.conj(point)) * point


def transport(to_point: np.ndarray, vector: np.ndarray) -> np.ndarray:
    """Move a tangent vector into the tangent space at `to_point`."""
    return vector - np.real(vector * np.conj(to_point)) * to_point


def retract(point: np.ndarray, step: float, direction: np.ndarray) -> np.ndarray:
    """Elementwise normalization of point + step * direction back to the circles."""
    moved = point + step * direction
    mags = np.abs(moved)
    if np.any(mags == 0):
        raise RetractionSingularityError("retraction hit an exactly zero entry")
    return moved / mags


def polak_ribiere(
    grad_new: np.ndarray,
    grad_old_transported: np.ndarray,
    grad_old_norm_sq: float,
) -> float:
    """Nonnegative Polak-Ribiere coefficient; 0 restarts to steepest descent."""
    if grad_old_norm_sq <= 0:
        return 0.0
    return max(0.0, inner(grad_new, grad_new - grad_old_transported) / grad_old_norm_sq)


def rcg_minimize(objective, egrad, start: np.ndarray, config: RcgConfig | None = None) -> RcgResult:
    """Minimize `objective` over the circle product with Armijo-safeguarded RCG.

    Returns the final point, the (nonincreasing) objective trace, the iteration
    count and a `stalled` flag set when the line search ran out of backtracks.
    """
    cfg = config or RcgConfig()
    theta = np.asarray(start, dtype=complex)
    theta = theta / np.abs(theta)
    f_val = float(objective(theta))
    grad = riemannian_grad(theta, egrad(theta))
    grad_sq = inner(grad, grad)
    direction = -grad
    trace = [f_val]
    stalled = False
    iters = 0
    last_step = cfg.armijo_initial_step

    while iters < cfg.max_iters and np.sqrt(grad_sq) > cfg.grad_tolerance:
        slope = inner(grad, direction)
        if slope >= 0 and cfg.restart_on_nondescent:
            direction = -grad
            slope = -grad_sq
        # warm-started backtracking: resume near the last accepted step
        step = min(cfg.armijo_initial_step, last_step / cfg.armijo_contraction)
        accepted = False
        for _ in range(cfg.max_backtracks):
            candidate = retract(theta, step, direction)
            f_new = float(objective(candidate))
            if f_new <= f_val + cfg.armijo_slope * step * slope:
                accepted = True
                break
            step *= cfg.armijo_contraction
        if not accepted:
            stalled = True
            break
        last_step = step
        grad_new = riemannian_grad(candidate, egrad(candidate))
        beta = polak_ribiere(grad_new, transport(candidate, grad), grad_sq)
        direction = -grad_new + beta * transport(candidate, direction)
        theta, f_val, grad = candidate, f_new, grad_new
        grad_sq = inner(grad, grad)
        trace.append(f_val)
        iters += 1

    return RcgResult(
        point=theta,
        trace=np.asarray(trace),
        iterations=iters,
        grad_norm=float(np.sqrt(grad_sq)),
        stalled=stalled,
    )


def check_gradient(
    objective,
    egrad,
    point: np.ndarray,
    seed: int = 0,
    step: float = 1e-6,
) -> float:
    """Relative error of the Riemannian directional derivative vs finite differences."""
    rng = np.random.default_rng(seed)
    raw = rng.standard_normal(point.size) + 1j * rng.standard_normal(point.size)
    direction = transport(point, raw)
    direction = direction / np.sqrt(inner(direction, direction))
    analytic = inner(riemannian_grad(point, egrad(point)), direction)
    numeric = (objective(retract(point, step, direction)) - objective(point)) / step
    return abs(numeric - analytic) / max(1e-12, abs(analytic))
