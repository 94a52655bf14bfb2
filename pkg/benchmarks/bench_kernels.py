"""Timing comparison of the numba kernels against the vectorized numpy path.

Run:  python3 benchmarks/bench_kernels.py
The numba path must be active (leave RISOAM_NUMBA unset); the numpy reference
implementations are always importable, so both are timed in one process.
"""

import time

import numpy as np

from risoam import _kernels as k
from risoam.optimizer import theta1_workspace, theta2_workspace
from risoam.testing import random_instance


def _time(fn, args, repeats=2000):
    fn(*args)  # warm-up / compile
    start = time.perf_counter()
    for _ in range(repeats):
        fn(*args)
    return (time.perf_counter() - start) / repeats


def _row(name, jit_fn, np_fn, args, repeats):
    t_jit = _time(jit_fn, args, repeats)
    t_np = _time(np_fn, args, repeats)
    print(f"{name:18s} numba {t_jit * 1e6:9.2f} us   numpy {t_np * 1e6:9.2f} us   "
          f"speedup {t_np / t_jit:5.2f}x")


def main():
    if not k.NUMBA_ACTIVE:
        print("numba path is disabled (RISOAM_NUMBA=0); timing numpy against itself")
    for q, n_signal, repeats in ((12, 3, 4000), (40, 3, 1500), (64, 4, 600)):
        n_modes = 8
        inst = random_instance(seed=0, n_modes=n_modes, n_eve=n_modes, q1=q, q2=q,
                               n_low=4, n_signal=n_signal, n_an=n_signal)
        ws1 = theta1_workspace(inst.channels, inst.ris.theta2, inst.ris.a, inst.state,
                               inst.codebook, 0, inst.f_matrix, inst.budget)
        ws2 = theta2_workspace(inst.channels, inst.ris.theta1, inst.ris.a, inst.state,
                               inst.codebook, 0, inst.f_matrix, inst.budget)
        args1 = (inst.ris.theta1, ws1.mu, ws1.eta, ws1.zeta, ws1.p, ws1.const_b,
                 ws1.sigma_an_sq, ws1.sigma_e_sq)
        args2 = (inst.ris.theta2, ws2.mu, ws2.iota2, ws2.p, ws2.sigma_r2_sq,
                 ws2.sigma_b_sq)
        print(f"-- Q = {q}, N_s = {n_signal}")
        _row("phase1 objective", k.theta1_value, k.theta1_value_np, args1, repeats)
        _row("phase1 gradient", k.theta1_grad, k.theta1_grad_np, args1, repeats)
        _row("phase2 objective", k.theta2_value, k.theta2_value_np, args2, repeats)
        _row("phase2 gradient", k.theta2_grad, k.theta2_grad_np, args2, repeats)

        rng = np.random.default_rng(1)
        root = rng.standard_normal((q, q))
        q_matrix = np.ascontiguousarray(root @ root.T / q + 0.2 * np.eye(q))
        h = rng.standard_normal(q)

        def run_box(fn):
            a = np.zeros(q)
            fn(q_matrix, h, a, 2.0, 500, 1e-13)
            return a

        _row("box QP solve", lambda *a_: run_box(k.box_qp_maximize),
             lambda *a_: run_box(k._box_qp_loops), (), max(200, repeats // 10))
        print()


if __name__ == "__main__":
    main()
