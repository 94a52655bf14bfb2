"""Hot kernels: objective and Euclidean gradient of the two phase subproblems.

Each kernel ships in two versions: a vectorized numpy implementation and a
loop form compiled with numba. The numba path is used when importable unless
RISOAM_NUMBA=0 (or "false"/"off") is set, which selects the numpy fallbacks.
Workspaces pass C-contiguous arrays so each kernel compiles once.
"""

from __future__ import annotations

import os

import numpy as np

LN2 = float(np.log(2.0))


def _numba_requested() -> bool:
    flag = os.environ.get("RISOAM_NUMBA", "1").strip().lower()
    return flag not in ("0", "false", "off", "no")


# --------------------------------------------------------------------------
# numpy implementations
# --------------------------------------------------------------------------


def _theta1_tables(theta, mu, eta, zeta, p, const_b, sigma_an_sq, sigma_e_sq):
    n_sig = mu.shape[1]
    idx = np.arange(mu.shape[0])
    s = np.einsum("q,lkq->lk", np.conj(theta), mu)
    u = zeta + np.einsum("q,lkq->lk", np.conj(theta), eta)
    ps2 = p[None, :] * np.abs(s) ** 2
    full_b = ps2.sum(axis=1) + const_b
    part_b = full_b - ps2[idx, idx]
    au2 = np.abs(u) ** 2
    full_e = (au2[:, :n_sig] * p[None, :]).sum(axis=1)
    full_e += sigma_an_sq * au2[:, n_sig:].sum(axis=1) + sigma_e_sq
    part_e = full_e - p * au2[idx, idx]
    return s, u, full_b, part_b, full_e, part_e


def theta1_value_np(theta, mu, eta, zeta, p, const_b, sigma_an_sq, sigma_e_sq):
    _, _, full_b, part_b, full_e, part_e = _theta1_tables(
        theta, mu, eta, zeta, p, const_b, sigma_an_sq, sigma_e_sq
    )
    return float(
        -(np.log(full_b) - np.log(part_b) - np.log(full_e) + np.log(part_e)).sum() / LN2
    )


def theta1_grad_np(theta, mu, eta, zeta, p, const_b, sigma_an_sq, sigma_e_sq):
    n_sig = mu.shape[1]
    idx = np.arange(mu.shape[0])
    s, u, full_b, part_b, full_e, part_e = _theta1_tables(
        theta, mu, eta, zeta, p, const_b, sigma_an_sq, sigma_e_sq
    )
    w = p[None, :] * np.conj(s)
    grad = -np.einsum("lk,lkq->q", w / full_b[:, None], mu)
    w_part = w.copy()
    w_part[idx, idx] = 0.0
    grad += np.einsum("lk,lkq->q", w_part / part_b[:, None], mu)
    coef = np.concatenate([p, np.full(eta.shape[1] - n_sig, sigma_an_sq)])
    cu = coef[None, :] * np.conj(u)
    grad += np.einsum("lk,lkq->q", cu / full_e[:, None], eta)
    cu_part = cu.copy()
    cu_part[idx, idx] = 0.0
    grad -= np.einsum("lk,lkq->q", cu_part / part_e[:, None], eta)
    return (2.0 / LN2) * grad


def _theta2_tables(theta, mu, iota2, p, sigma_r2_sq, sigma_b_sq):
    idx = np.arange(mu.shape[0])
    s = np.einsum("q,lkq->lk", np.conj(theta), mu)
    ps2 = p[None, :] * np.abs(s) ** 2
    noise = sigma_r2_sq * (iota2 * (np.abs(theta) ** 2)[None, :]).sum(axis=1)
    full_b = ps2.sum(axis=1) + noise + sigma_b_sq
    part_b = full_b - ps2[idx, idx]
    return s, full_b, part_b


def theta2_value_np(theta, mu, iota2, p, sigma_r2_sq, sigma_b_sq):
    _, full_b, part_b = _theta2_tables(theta, mu, iota2, p, sigma_r2_sq, sigma_b_sq)
    return float(-(np.log(full_b) - np.log(part_b)).sum() / LN2)


def theta2_grad_np(theta, mu, iota2, p, sigma_r2_sq, sigma_b_sq):
    idx = np.arange(mu.shape[0])
    s, full_b, part_b = _theta2_tables(theta, mu, iota2, p, sigma_r2_sq, sigma_b_sq)
    w = p[None, :] * np.conj(s)
    grad = -np.einsum("lk,lkq->q", w / full_b[:, None], mu)
    grad -= sigma_r2_sq * (iota2 / full_b[:, None]).sum(axis=0) * theta
    w_part = w.copy()
    w_part[idx, idx] = 0.0
    grad += np.einsum("lk,lkq->q", w_part / part_b[:, None], mu)
    grad += sigma_r2_sq * (iota2 / part_b[:, None]).sum(axis=0) * theta
    return (2.0 / LN2) * grad


# --------------------------------------------------------------------------
# loop forms (numba-compiled when active)
# --------------------------------------------------------------------------


def _theta1_value_loops(theta, mu, eta, zeta, p, const_b, sigma_an_sq, sigma_e_sq):
    n_sig = mu.shape[1]
    n_all = eta.shape[1]
    n_q = theta.size
    acc = 0.0
    for l in range(mu.shape[0]):
        full_b = const_b[l]
        diag_b = 0.0
        for k in range(n_sig):
            s = 0.0 + 0.0j
            for q in range(n_q):
                s += theta[q].conjugate() * mu[l, k, q]
            m2 = p[k] * (s.real * s.real + s.imag * s.imag)
            full_b += m2
            if k == l:
                diag_b = m2
        full_e = sigma_e_sq
        diag_e = 0.0
        for k in range(n_all):
            u = zeta[l, k]
            for q in range(n_q):
                u += theta[q].conjugate() * eta[l, k, q]
            coef = p[k] if k < n_sig else sigma_an_sq
            m2 = coef * (u.real * u.real + u.imag * u.imag)
            full_e += m2
            if k == l:
                diag_e = m2
        acc += (
            np.log(full_b)
            - np.log(full_b - diag_b)
            - np.log(full_e)
            + np.log(full_e - diag_e)
        )
    return -acc / LN2


def _theta1_grad_loops(theta, mu, eta, zeta, p, const_b, sigma_an_sq, sigma_e_sq):
    n_l, n_sig, n_q = mu.shape
    n_all = eta.shape[1]
    s = np.empty((n_sig,), dtype=np.complex128)
    u = np.empty((n_all,), dtype=np.complex128)
    grad = np.zeros(n_q, dtype=np.complex128)
    for l in range(n_l):
        full_b = const_b[l]
        for k in range(n_sig):
            acc = 0.0 + 0.0j
            for q in range(n_q):
                acc += theta[q].conjugate() * mu[l, k, q]
            s[k] = acc
            full_b += p[k] * (acc.real * acc.real + acc.imag * acc.imag)
        part_b = full_b - p[l] * (s[l].real * s[l].real + s[l].imag * s[l].imag)
        full_e = sigma_e_sq
        for k in range(n_all):
            acc = zeta[l, k]
            for q in range(n_q):
                acc += theta[q].conjugate() * eta[l, k, q]
            u[k] = acc
            coef = p[k] if k < n_sig else sigma_an_sq
            full_e += coef * (acc.real * acc.real + acc.imag * acc.imag)
        part_e = full_e - p[l] * (u[l].real * u[l].real + u[l].imag * u[l].imag)
        for k in range(n_sig):
            wc = p[k] * s[k].conjugate()
            w_full = -wc / full_b
            w_part = wc / part_b if k != l else 0.0 + 0.0j
            w = w_full + w_part
            for q in range(n_q):
                grad[q] += w * mu[l, k, q]
        for k in range(n_all):
            coef = p[k] if k < n_sig else sigma_an_sq
            cu = coef * u[k].conjugate()
            w_full = cu / full_e
            w_part = -cu / part_e if k != l else 0.0 + 0.0j
            w = w_full + w_part
            for q in range(n_q):
                grad[q] += w * eta[l, k, q]
    return (2.0 / LN2) * grad


def _theta2_value_loops(theta, mu, iota2, p, sigma_r2_sq, sigma_b_sq):
    n_l, n_sig, n_q = mu.shape
    acc = 0.0
    for l in range(n_l):
        noise = 0.0
        for q in range(n_q):
            noise += iota2[l, q] * (theta[q].real ** 2 + theta[q].imag ** 2)
        full_b = sigma_r2_sq * noise + sigma_b_sq
        diag_b = 0.0
        for k in range(n_sig):
            s = 0.0 + 0.0j
            for q in range(n_q):
                s += theta[q].conjugate() * mu[l, k, q]
            m2 = p[k] * (s.real * s.real + s.imag * s.imag)
            full_b += m2
            if k == l:
                diag_b = m2
        acc += np.log(full_b) - np.log(full_b - diag_b)
    return -acc / LN2


def _theta2_grad_loops(theta, mu, iota2, p, sigma_r2_sq, sigma_b_sq):
    n_l, n_sig, n_q = mu.shape
    s = np.empty((n_sig,), dtype=np.complex128)
    grad = np.zeros(n_q, dtype=np.complex128)
    for l in range(n_l):
        noise = 0.0
        for q in range(n_q):
            noise += iota2[l, q] * (theta[q].real ** 2 + theta[q].imag ** 2)
        full_b = sigma_r2_sq * noise + sigma_b_sq
        for k in range(n_sig):
            acc = 0.0 + 0.0j
            for q in range(n_q):
                acc += theta[q].conjugate() * mu[l, k, q]
            s[k] = acc
            full_b += p[k] * (acc.real * acc.real + acc.imag * acc.imag)
        part_b = full_b - p[l] * (s[l].real * s[l].real + s[l].imag * s[l].imag)
        for k in range(n_sig):
            wc = p[k] * s[k].conjugate()
            w = -wc / full_b + (wc / part_b if k != l else 0.0 + 0.0j)
            for q in range(n_q):
                grad[q] += w * mu[l, k, q]
        scale = sigma_r2_sq * (1.0 / part_b - 1.0 / full_b)
        for q in range(n_q):
            grad[q] += scale * iota2[l, q] * theta[q]
    return (2.0 / LN2) * grad


def _box_qp_loops(q_matrix, h, a, hi, max_passes, tol):
    """Cyclic coordinate ascent for max -a'Qa + 2a'h over 0 <= a <= hi, in place."""
    n = h.size
    for _ in range(max_passes):
        delta_max = 0.0
        for i in range(n):
            qii = q_matrix[i, i]
            s = 0.0
            for j in range(n):
                s += q_matrix[i, j] * a[j]
            s -= qii * a[i]
            if qii > 0.0:
                new = (h[i] - s) / qii
                if new < 0.0:
                    new = 0.0
                elif new > hi:
                    new = hi
            else:
                new = hi if h[i] - s > 0.0 else 0.0
            d = abs(new - a[i])
            if d > delta_max:
                delta_max = d
            a[i] = new
        if delta_max <= tol:
            break
    return a


# numpy fallbacks are the pure-Python forms of the same loops
box_qp_maximize = _box_qp_loops

NUMBA_ACTIVE = False
theta1_value = theta1_value_np
theta1_grad = theta1_grad_np
theta2_value = theta2_value_np
theta2_grad = theta2_grad_np

if _numba_requested():
    try:
        from numba import njit
    except ImportError:
        pass
    else:
        theta1_value = njit(cache=True)(_theta1_value_loops)
        theta1_grad = njit(cache=True)(_theta1_grad_loops)
        theta2_value = njit(cache=True)(_theta2_value_loops)
        theta2_grad = njit(cache=True)(_theta2_grad_loops)
        box_qp_maximize = njit(cache=True)(_box_qp_loops)
        NUMBA_ACTIVE = True
