"""Solvers for the power-allocation and amplifier-gain subproblems.

The power step is a smooth concave maximization over a small polytope, solved
by Barzilai-Borwein projected gradient ascent with an Armijo safeguard; the
projection onto the polytope is exact (water-filling inside a bisection on
the RIS power constraint's multiplier). The amplifier step is a concave QP
over a box intersected with one quadratic constraint, solved in the dual:
bisection on the quadratic constraint's multiplier around an inner box-QP
handled by cyclic coordinate ascent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import box_qp_maximize


class InfeasibleError(RuntimeError):
    """The constraint set is empty; the message names the violated constraint."""


# --------------------------------------------------------------------------
# shared projected-ascent core
# --------------------------------------------------------------------------


def _pgd_maximize(value, grad, project, start, step, tolerance, max_iters):
    x = project(np.asarray(start, dtype=float))
    f_val = value(x)
    g = grad(x)
    stalls = 0
    for _ in range(max_iters):
        if np.linalg.norm(x - project(x + g)) <= tolerance:
            break
        accepted = False
        trial = step
        for _ in range(60):
            cand = project(x + trial * g)
            gain_ref = float(g @ (cand - x))
            if gain_ref <= 0:
                break
            if value(cand) >= f_val + 1e-4 * gain_ref:
                accepted = True
                break
            trial *= 0.5
        if not accepted:
            break
        s = cand - x
        x = cand
        f_new = value(x)
        stalls = stalls + 1 if f_new - f_val < 1e-12 * (1.0 + abs(f_val)) else 0
        f_val = f_new
        g_new = grad(x)
        denom = float(s @ (g - g_new))
        step = float(s @ s) / denom if denom > 1e-300 else trial * 2.0
        g = g_new
        if stalls >= 3 or np.linalg.norm(s) < 1e-15 * (1 + np.linalg.norm(x)):
            break
    return x


# --------------------------------------------------------------------------
# power allocation
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class PowerProblem:
    """Data of the concave power-allocation step with auxiliary t fixed."""

    gains_bob: np.ndarray
    gains_eve: np.ndarray
    c1: np.ndarray
    c2: np.ndarray
    t_bob: np.ndarray
    t_eve: np.ndarray
    budget: float
    p_floor: float
    ris2_coeffs: np.ndarray
    ris2_offset: float
    ris2_limit: float
    sigma_b_sq: float
    sigma_e_sq: float


def power_objective(problem: PowerProblem, p: np.ndarray) -> float:
    """Objective of the allocation step in nats (larger is better)."""
    b = problem.gains_bob
    e = problem.gains_eve
    bsum = b @ p
    esum = e @ p
    bdiag = np.diag(b) * p
    ediag = np.diag(e) * p
    full_b = 1.0 + (bsum + problem.c1) / problem.sigma_b_sq
    part_b = 1.0 + (bsum - bdiag + problem.c1) / problem.sigma_b_sq
    full_e = 1.0 + (esum + problem.c2) / problem.sigma_e_sq
    part_e = 1.0 + (esum - ediag + problem.c2) / problem.sigma_e_sq
    phi_b = np.log(full_b) - problem.t_bob * part_b + np.log(problem.t_bob) + 1.0
    phi_e = problem.t_eve * full_e - np.log(part_e) - np.log(problem.t_eve) - 1.0
    return float(phi_b.sum() - phi_e.sum())


def power_gradient(problem: PowerProblem, p: np.ndarray) -> np.ndarray:
    b = problem.gains_bob
    e = problem.gains_eve
    b0 = b - np.diag(np.diag(b))
    e0 = e - np.diag(np.diag(e))
    full_b = 1.0 + (b @ p + problem.c1) / problem.sigma_b_sq
    part_e = 1.0 + (e0 @ p + problem.c2) / problem.sigma_e_sq
    return (
        b.T @ (1.0 / full_b) / problem.sigma_b_sq
        - b0.T @ problem.t_bob / problem.sigma_b_sq
        - e.T @ problem.t_eve / problem.sigma_e_sq
        + e0.T @ (1.0 / part_e) / problem.sigma_e_sq
    )


def _project_floor_budget(y: np.ndarray, floor: float, budget: float) -> np.ndarray:
    """Exact projection onto {p >= floor, sum(p) <= budget} by water-filling."""
    p = np.maximum(y, floor)
    if p.sum() <= budget:
        return p
    # p = max(floor, y - lam); find the kink interval where the sum hits budget
    target = budget - floor * y.size
    if target <= 0:
        return np.full_like(y, floor)
    d = np.sort(y - floor)[::-1]
    prefix = np.cumsum(d)
    k = np.arange(1, y.size + 1)
    lam_candidates = (prefix - target) / k
    valid = lam_candidates < d
    # the largest k whose candidate lies below its kink gives the exact multiplier
    idx = int(np.nonzero(valid)[0][-1])
    lam = max(0.0, float(lam_candidates[idx]))
    return np.maximum(y - lam, floor)


def _project_power_feasible(p: np.ndarray, problem: PowerProblem) -> np.ndarray:
    """Exact projection onto the power polytope.

    The RIS halfspace's multiplier is found by bisection; the inner projection
    onto {p >= floor, sum <= budget} is exact, so the composite is the KKT
    solution of the full projection.
    """
    inner = lambda y: _project_floor_budget(y, problem.p_floor, problem.budget)
    candidate = inner(p)
    ris_active = np.isfinite(problem.ris2_limit) and np.any(problem.ris2_coeffs > 0)
    if not ris_active:
        return candidate
    w = problem.ris2_coeffs
    bound = problem.ris2_limit - problem.ris2_offset
    tol = 1e-15 * max(1.0, abs(bound))
    if float(w @ candidate) <= bound + tol:
        return candidate

    def used(mult):
        return float(w @ inner(p - mult * w))

    lo, hi = 0.0, 1.0
    while used(hi) > bound:
        lo = hi
        hi *= 2.0
        if hi > 1e30:
            break
    for _ in range(200):
        if hi - lo <= 1e-14 * (1.0 + hi):
            break
        mid = 0.5 * (lo + hi)
        if used(mid) > bound:
            lo = mid
        else:
            hi = mid
    return inner(p - hi * w)


def solve_power(
    problem: PowerProblem,
    tolerance: float = 1e-8,
    initial: np.ndarray | None = None,
    max_iters: int = 5000,
) -> np.ndarray:
    """Maximize the allocation objective over the budget/floor/RIS-power polytope.

    Warm-startable and monotone: the returned point is never worse than the
    (projected) initial point or the uniform allocation.
    """
    n = problem.gains_bob.shape[0]
    floor_point = np.full(n, problem.p_floor)
    if floor_point.sum() > problem.budget + 1e-12:
        raise InfeasibleError(
            f"power floor infeasible: N_s * p_th = {floor_point.sum():.3e} exceeds "
            f"budget {problem.budget:.3e}"
        )
    if np.isfinite(problem.ris2_limit):
        used = float(problem.ris2_coeffs @ floor_point) + problem.ris2_offset
        if used > problem.ris2_limit * (1 + 1e-9) + 1e-15:
            raise InfeasibleError(
                f"RIS radiated-power constraint infeasible at the floor point: "
                f"{used:.3e} > {problem.ris2_limit:.3e}"
            )

    candidates = [np.full(n, problem.budget / n)]
    if initial is not None:
        candidates.append(np.asarray(initial, dtype=float))
    candidates = [_project_power_feasible(c, problem) for c in candidates]
    start = max(candidates, key=lambda c: power_objective(problem, c))
    g0 = power_gradient(problem, start)
    step = 0.1 * max(problem.budget, 1e-30) / max(np.linalg.norm(g0, np.inf), 1e-30)
    return _pgd_maximize(
        lambda p: power_objective(problem, p),
        lambda p: power_gradient(problem, p),
        lambda p: _project_power_feasible(p, problem),
        start, step, tolerance, max_iters,
    )


# --------------------------------------------------------------------------
# amplifier gains
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class AmplifierProblem:
    """Concave quadratic in the real gain vector with box and power constraints."""

    omega: np.ndarray
    g: np.ndarray
    power_matrix: np.ndarray
    power_limit: float
    a_max: float


def amplifier_objective(problem: AmplifierProblem, a: np.ndarray) -> float:
    re_omega = np.real(problem.omega)
    return float(-a @ re_omega @ a + 2.0 * a @ np.real(problem.g))


def _power_quadratic(a: np.ndarray, pw: np.ndarray) -> float:
    return float(a @ pw @ a)


def solve_amplifier(
    problem: AmplifierProblem,
    tolerance: float = 1e-8,
    initial: np.ndarray | None = None,
    max_passes: int = 2000,
) -> np.ndarray:
    """Maximize -a' Omega a + 2 Re{a' g} over the gain box and power ellipsoid.

    Always feasible (a = 0). Solved in the dual of the quadratic power
    constraint: for a multiplier lam the inner box-QP max -a'(Omega + lam P)a
    + 2a'h is solved exactly by cyclic coordinate ascent, and lam is found by
    bisection on the complementary power residual. The result dominates the
    (projected) warm start, a = 0 and the clipped unconstrained optimum.
    """
    re_omega = np.ascontiguousarray(np.real(problem.omega))
    re_g = np.ascontiguousarray(np.real(problem.g))
    q = re_g.size
    pw = np.real(problem.power_matrix)
    pw = np.ascontiguousarray(0.5 * (pw + pw.T))
    limit_active = np.isfinite(problem.power_limit)
    if problem.a_max <= 0:
        return np.zeros(q)
    inner_tol = min(tolerance, 1e-12) * (1.0 + problem.a_max)

    def inner(lam, warm):
        q_matrix = re_omega + lam * pw if lam > 0 else re_omega
        a = np.array(warm, dtype=float)
        np.clip(a, 0.0, problem.a_max, out=a)
        box_qp_maximize(np.ascontiguousarray(q_matrix), re_g, a,
                        float(problem.a_max), max_passes, inner_tol)
        return a

    warm = np.zeros(q) if initial is None else np.asarray(initial, dtype=float)
    a0 = inner(0.0, warm)
    if not limit_active or _power_quadratic(a0, pw) <= problem.power_limit * (1 + 1e-12):
        best = a0
    else:
        lo, hi = 0.0, 1.0
        a_hi = inner(hi, a0)
        while _power_quadratic(a_hi, pw) > problem.power_limit:
            lo = hi
            hi *= 2.0
            a_hi = inner(hi, a_hi)
            if hi > 1e30:
                break
        a_mid = a_hi
        for _ in range(200):
            if hi - lo <= 1e-14 * (1.0 + hi):
                break
            mid = 0.5 * (lo + hi)
            a_mid = inner(mid, a_mid)
            if _power_quadratic(a_mid, pw) > problem.power_limit:
                lo = mid
            else:
                hi = mid
                a_hi = a_mid
        best = a_hi

    candidates = [best, np.zeros(q)]
    try:
        unconstrained = np.linalg.lstsq(re_omega, re_g, rcond=None)[0]
        clipped = np.clip(unconstrained, 0.0, problem.a_max)
        if limit_active:
            used = _power_quadratic(clipped, pw)
            if used > problem.power_limit:
                clipped = clipped * np.sqrt(problem.power_limit / used)
        candidates.append(clipped)
    except np.linalg.LinAlgError:
        pass
    if initial is not None:
        feasible_start = np.clip(warm, 0.0, problem.a_max)
        if limit_active:
            used = _power_quadratic(feasible_start, pw)
            if used > problem.power_limit:
                feasible_start = feasible_start * np.sqrt(problem.power_limit / used)
        candidates.append(feasible_start)
    final = max(candidates, key=lambda c: amplifier_objective(problem, c))
    return np.asarray(final, dtype=float)
