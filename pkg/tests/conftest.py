"""Shared oracles: a dense-matrix walk that shares no code with the library."""

import numpy as np
import pytest


def dense_translation(L):
    """T on sites -L..L, basis index 2*(j+L) + c (c = 0 for H, 1 for V)."""
    dim = 2 * (2 * L + 1)
    t = np.zeros((dim, dim), dtype=complex)
    for j in range(-L, L + 1):
        if j + 1 <= L:
            t[2 * (j + 1 + L), 2 * (j + L)] = 1.0
        if j - 1 >= -L:
            t[2 * (j - 1 + L) + 1, 2 * (j + L) + 1] = 1.0
    return t


def dense_step(coins, L):
    t = dense_translation(L)
    u = np.eye(t.shape[0], dtype=complex)
    for c in coins:  # U = T C_1 T C_2 ... ; rightmost acts first
        u = u @ t @ np.kron(np.eye(2 * L + 1), c)
    return u


def dense_evolve(coins, n, coin=(1.0, 0.0), site=0):
    """Amplitude array (2L+1, 2) on sites -L..L after n steps."""
    L = abs(site) + n * len(coins) + 1
    psi = np.zeros(2 * (2 * L + 1), dtype=complex)
    psi[2 * (site + L)] = coin[0]
    psi[2 * (site + L) + 1] = coin[1]
    u = dense_step(coins, L)
    for _ in range(n):
        psi = u @ psi
    return psi.reshape(-1, 2), L


@pytest.fixture
def rng():
    return np.random.default_rng(20261014)


def random_unitary(rng):
    z = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_coin(rng):
    z = rng.normal(size=2) + 1j * rng.normal(size=2)
    return tuple(z / np.linalg.norm(z))


def pytest_terminal_summary(terminalreporter):
    """Repeat the acceptance lines at the end of the run, in criterion order."""
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not getattr(mod, "RESULTS", None):
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
