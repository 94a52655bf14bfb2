"""Self-contained invariant suite behind the `validate` CLI subcommand."""

from __future__ import annotations

import numpy as np

from . import manifold
from .channel import los_channel
from .geometry import UcaSpec, rotation_matrix_x, rotation_matrix_y, uca_element_positions
from .oam import enumerate_sn_pairs, idft_matrix, rate_report
from .optimizer import (
    egrad_theta1,
    egrad_theta2,
    objective_theta1,
    objective_theta2,
    theta1_workspace,
    theta2_workspace,
)
from .testing import finite_difference_grad, random_instance


def _check_rotations():
    for angle in (0.0, 0.3, -1.2, np.pi / 2):
        for rot in (rotation_matrix_x(angle), rotation_matrix_y(angle)):
            if np.max(np.abs(rot.T @ rot - np.eye(3))) > 1e-12:
                return "rotation not orthogonal"
            if abs(np.linalg.det(rot) - 1.0) > 1e-12:
                return "rotation determinant != 1"
    return None


def _check_idft():
    for n in (2, 4, 8, 16):
        f = idft_matrix(n)
        if np.max(np.abs(np.conj(f).T @ f - np.eye(n))) > 1e-12:
            return f"IDFT not unitary at N={n}"
    return None


def _check_codebook():
    codebook = enumerate_sn_pairs(8, 4, 3, 3)
    if codebook.size != 8:
        return f"default partition should give G=8, got {codebook.size}"
    if any(0 not in pair.signal_modes for pair in codebook.pairs):
        return "a pair omits mode 0"
    return None


def _check_manifold():
    rng = np.random.default_rng(7)
    theta = np.exp(2j * np.pi * rng.random(6))
    egrad = rng.standard_normal(6) + 1j * rng.standard_normal(6)
    grad = manifold.riemannian_grad(theta, egrad)
    if np.max(np.abs(np.real(grad * np.conj(theta)))) > 1e-12:
        return "projection not tangent"
    v = rng.standard_normal(8) + 1j * rng.standard_normal(8)

    def objective(th):
        return -abs(np.vdot(th, v)) ** 2

    def grad_fn(th):
        return -2.0 * v * np.vdot(v, th)

    res = manifold.rcg_minimize(objective, grad_fn, np.ones(8, dtype=complex) * 1j)
    target = -float(np.abs(v).sum() ** 2)
    if abs(res.trace[-1] - target) > 1e-8 * abs(target):
        return "coherent combining optimum missed"
    if np.any(np.diff(res.trace) > 1e-12):
        return "objective trace increased"
    return None


def _check_gradients():
    inst = random_instance(seed=3, n_modes=4, n_eve=4, q1=6, q2=6, n_low=2,
                           n_signal=2, n_an=2)
    ws1 = theta1_workspace(inst.channels, inst.ris.theta2, inst.ris.a, inst.state,
                           inst.codebook, 0, inst.f_matrix, inst.budget)
    rel = finite_difference_grad(
        lambda th: objective_theta1(th, ws1), lambda th: egrad_theta1(th, ws1),
        inst.ris.theta1,
    )
    if rel > 1e-5:
        return f"theta1 gradient FD mismatch ({rel:.2e})"
    ws2 = theta2_workspace(inst.channels, inst.ris.theta1, inst.ris.a, inst.state,
                           inst.codebook, 0, inst.f_matrix, inst.budget)
    rel = finite_difference_grad(
        lambda th: objective_theta2(th, ws2), lambda th: egrad_theta2(th, ws2),
        inst.ris.theta2,
    )
    if rel > 1e-5:
        return f"theta2 gradient FD mismatch ({rel:.2e})"
    return None


def _check_rates():
    inst = random_instance(seed=11)
    report = rate_report(inst.channels, inst.ris, inst.state, inst.codebook, 0,
                         inst.f_matrix, inst.budget.sigma_b_sq, inst.budget.sigma_e_sq,
                         inst.budget.sigma_r2_sq)
    if abs(report.c_b - report.r_b - inst.codebook.index_bits) > 1e-12:
        return "C_B - R_B != log2 G"
    if abs(report.r_oam - (report.c_b - report.r_e)) > 1e-12:
        return "R_OAM != C_B - R_E"
    return None


def _check_circulant():
    n = 8
    spec_a = UcaSpec(center=(0.0, 0.0, 0.0), radius=0.5, count=n)
    spec_b = UcaSpec(center=(0.0, 0.0, 10.0), radius=0.5, count=n)
    h = los_channel(uca_element_positions(spec_a), uca_element_positions(spec_b),
                    1.0, 0.01)
    f = idft_matrix(n)
    d = np.conj(f).T @ h @ f
    off = d - np.diag(np.diag(d))
    ratio = np.max(np.abs(off)) / np.min(np.abs(np.diag(d)))
    if ratio > 1e-8:
        return f"aligned coaxial UCAs not diagonalized (ratio {ratio:.2e})"
    return None


CHECKS = (
    ("rotation matrices orthonormal", _check_rotations),
    ("IDFT unitarity", _check_idft),
    ("codebook size and mode-0 membership", _check_codebook),
    ("manifold projection / RCG descent", _check_manifold),
    ("phase gradients vs finite differences", _check_gradients),
    ("rate identities", _check_rates),
    ("circulant diagonalization", _check_circulant),
)


def run_all() -> int:
    failures = 0
    for name, check in CHECKS:
        detail = check()
        if detail is None:
            print(f"PASS {name}")
        else:
            failures += 1
            print(f"FAIL {name}: {detail}")
    return 1 if failures else 0
