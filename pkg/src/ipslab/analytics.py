"""Closed-form and numerical evaluation of every prediction the lab checks.

Covers the mean-field free-energy landscape and its crossover-time formula,
the sparse-graph energy-barrier bounds, the voter-model profile function and
diffusion constants (including the continued-fraction constant under edge
rewiring), Fisher-Wright integration, exact birth-death hitting times, and
the contact-process asymptotics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import mpmath as mp
import numpy as np
from scipy.special import ndtri

from . import rng
from .errors import (
    DegenerateLandscapeError,
    DomainError,
    NumericalError,
    ParameterError,
)
from .models import CP, SIM, VM

__all__ = [
    "entropy_I",
    "entropy_IN",
    "free_energy",
    "free_energy_d1",
    "free_energy_d2",
    "landscape_roots",
    "stationary_points",
    "chi",
    "kramers",
    "MetastableTriple",
    "i_delta",
    "i_delta_holds",
    "gamma_bounds",
    "GammaBounds",
    "theta_d",
    "profile_f_d",
    "catalan_series",
    "theta_d_nu",
    "theta_directed_eulerian",
    "fw_simulate",
    "FWEnsemble",
    "bd_mean_absorption",
    "lumped_rates",
    "cw_lumped_endpoints",
    "cw_crossover_time",
    "extinction_asymptotic",
    "rho_exponent",
    "RhoExponent",
]


# ---------------------------------------------------------------------------
# Mean-field free-energy landscape
# ---------------------------------------------------------------------------


def entropy_I(m: float) -> float:
    """(1/2)(1+m)log(1+m) + (1/2)(1-m)log(1-m), with 0*log0 = 0."""
    if not -1.0 <= m <= 1.0:
        raise DomainError("entropy_I needs m in [-1,1]")

    def xlogx(x: float) -> float:
        return 0.0 if x == 0.0 else x * math.log(x)

    return 0.5 * (xlogx(1.0 + m) + xlogx(1.0 - m))


def entropy_IN(m: float, N: int) -> float:
    """Finite-N entropy -log(binom(N, (1+m)N/2))/N."""
    if not -1.0 <= m <= 1.0:
        raise DomainError("entropy_IN needs m in [-1,1]")
    k2 = (1.0 + m) * N / 2.0
    k = round(k2)
    if abs(k2 - k) > 1e-9:
        raise ParameterError("(1+m)N/2 must be an integer")
    logbinom = math.lgamma(N + 1) - math.lgamma(k + 1) - math.lgamma(N - k + 1)
    return -logbinom / N


def free_energy(m: float, beta: float, h: float) -> float:
    return -0.5 * m * m - h * m + entropy_I(m) / beta


def free_energy_d1(m: float, beta: float, h: float) -> float:
    return -m - h + math.atanh(m) / beta


def free_energy_d2(m: float, beta: float) -> float:
    return -1.0 + 1.0 / (beta * (1.0 - m * m))


def _bisect_root(beta: float, h: float, lo: float, hi: float) -> float:
    flo = free_energy_d1(lo, beta, h)
    fhi = free_energy_d1(hi, beta, h)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    assert flo * fhi < 0
    while hi - lo > 1e-15:
        mid = 0.5 * (lo + hi)
        fm = free_energy_d1(mid, beta, h)
        if fm == 0.0:
            return mid
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def landscape_roots(beta: float, h: float) -> list[float]:
    """All solutions of atanh(m) = beta*(m+h) on (-1, 1), in increasing order."""
    if beta <= 0:
        raise DomainError("landscape_roots needs beta > 0")
    eps = 1e-13
    lo, hi = -1.0 + eps, 1.0 - eps
    if beta <= 1.0:
        return [_bisect_root(beta, h, lo, hi)]
    mc = math.sqrt(1.0 - 1.0 / beta)
    roots = []
    for a, b in ((lo, -mc), (-mc, mc), (mc, hi)):
        fa, fb = free_energy_d1(a, beta, h), free_energy_d1(b, beta, h)
        if fa == 0.0 or fa * fb < 0:
            roots.append(_bisect_root(beta, h, a, b))
        elif fb == 0.0 and b == hi:
            roots.append(b)
    # dedupe near-coincident roots at the fold (h -> chi(beta))
    out: list[float] = []
    for r in roots:
        if not out or abs(r - out[-1]) > 1e-9:
            out.append(r)
    return out


def stationary_points(beta: float, h: float) -> tuple[float, float, float]:
    """The ordered triple (m_minus, m_star, m_plus) in the metastable regime."""
    roots = landscape_roots(beta, h)
    if len(roots) != 3:
        err = DegenerateLandscapeError(
            f"{len(roots)} stationary point(s) at beta={beta}, h={h}; no triple"
        )
        err.roots = roots
        raise err
    m_minus, m_star, m_plus = roots
    if not (free_energy_d2(m_minus, beta) > 0 > free_energy_d2(m_star, beta)
            and free_energy_d2(m_plus, beta) > 0):
        raise DegenerateLandscapeError("curvatures do not alternate")
    return m_minus, m_star, m_plus


def chi(beta: float) -> float:
    """Field threshold below which the landscape is double-welled."""
    if beta <= 1.0:
        raise DomainError("chi needs beta > 1")
    r = math.sqrt(1.0 - 1.0 / beta)
    return r - math.log(beta * (1.0 + r) ** 2) / (2.0 * beta)


@dataclass(frozen=True)
class MetastableTriple:
    m_minus: float
    m_star: float
    m_plus: float
    gamma: float
    prefactor: float


def kramers(beta: float, h: float) -> MetastableTriple:
    """Barrier height and prefactor of the mean crossover time K*exp(N*Gamma)."""
    m_minus, m_star, m_plus = stationary_points(beta, h)
    gamma = beta * (free_energy(m_star, beta, h) - free_energy(m_minus, beta, h))
    c_star = free_energy_d2(m_star, beta)
    c_minus = free_energy_d2(m_minus, beta)
    if c_star >= 0 or c_minus <= 0:
        raise DegenerateLandscapeError("saddle/well curvatures have wrong signs")
    prefactor = (math.pi / beta) * math.sqrt(
        (1.0 + m_star)
        / (1.0 - m_star)
        / (1.0 - m_minus * m_minus)
        / ((-c_star) * c_minus)
    )
    return MetastableTriple(m_minus, m_star, m_plus, gamma, prefactor)


# ---------------------------------------------------------------------------
# Sparse-graph barrier machinery
# ---------------------------------------------------------------------------


def _xlogx(x: float) -> float:
    return 0.0 if x <= 0.0 else x * math.log(x)


def i_delta_holds(x: float, delta: float, y: float) -> bool:
    """Direct log-space evaluation of the defining product inequality."""
    g = (
        x * (1.0 - 1.0 / delta) * math.log(x)
        + (1.0 - x) * (1.0 - 1.0 / delta) * math.log(1.0 - x)
        - 0.5 * _xlogx(1.0 - x - y)
        - 0.5 * _xlogx(x - y)
        - _xlogx(y)
    )
    return g > 0.0


def i_delta(x: float, delta: float, grid: int = 10_000) -> float:
    """Infimum of the y-set defined by the barrier-counting inequality.

    Located by a grid scan followed by bisection to 1e-10; the returned value
    satisfies the inequality.  Returns NaN when the set is empty on (0, x].
    """
    if not 0.0 < x <= 0.5:
        raise DomainError("i_delta needs x in (0, 1/2]")
    if delta <= 1.0:
        raise DomainError("i_delta needs delta > 1")
    if i_delta_holds(x, delta, x * 1e-12):
        # the inequality holds arbitrarily close to 0 (delta <= 2): inf is 0
        return 0.0
    ys = x * np.arange(1, grid + 1) / grid
    hit = None
    for j, y in enumerate(ys):
        if i_delta_holds(x, delta, float(y)):
            hit = j
            break
    if hit is None:
        return float("nan")
    lo = float(ys[hit - 1]) if hit > 0 else float(x * 1e-12)
    hi = float(ys[hit])
    while hi - lo > 1e-10:
        mid = 0.5 * (lo + hi)
        if i_delta_holds(x, delta, mid):
            hi = mid
        else:
            lo = mid
    return hi


@dataclass(frozen=True)
class GammaBounds:
    M_bar: int
    M_tilde: int
    ell: np.ndarray
    gamma_plus: float
    gamma_minus: float
    band_plus: float
    band_minus: float


def gamma_bounds(degrees: Sequence[int], J: float, h: float) -> GammaBounds:
    """Upper/lower central terms for the energy barrier of a degree sequence.

    ``band_plus`` is the stated O(ell_N^(3/4)) half-width; the lower bound's
    o(N) defect has no finite-N constant, so ``band_minus`` is reported as 0.
    """
    if J <= 0 or h <= 0:
        raise ParameterError("gamma_bounds needs J, h > 0")
    deg = np.sort(np.asarray(degrees, dtype=np.int64))
    N = len(deg)
    ell = np.concatenate([[0], np.cumsum(deg)]).astype(float)  # ell[0..N]
    ell_N = ell[N]
    ratio = h / J

    def phi(M: int) -> float:
        return ell[M] * (1.0 - ell[M] / ell_N)

    M_bar = N
    for M in range(1, N):
        if ratio >= phi(M + 1) - phi(M):
            M_bar = M
            break

    M_tilde = N
    for M in range(1, N + 1):
        if ell[M] >= 0.5 * ell_N:
            M_tilde = M
            break

    d_ave = ell_N / N
    gamma_plus = J * phi(M_bar) - h * M_bar
    gamma_minus = J * d_ave * i_delta(0.5, d_ave) * N - h * M_tilde
    return GammaBounds(
        M_bar, M_tilde, ell, gamma_plus, gamma_minus, ell_N ** 0.75, 0.0
    )


# ---------------------------------------------------------------------------
# Voter-model profile function and diffusion constants
# ---------------------------------------------------------------------------


def theta_d(d: int) -> float:
    if d < 3:
        raise DomainError("theta_d needs d >= 3")
    return (d - 2.0) / (d - 1.0)


def catalan_series(x: float, tol: float = 1e-12) -> float:
    """Sum of Catalan(l) * x**l, truncated when the geometric tail bound < tol."""
    if not 0.0 <= x < 0.25:
        raise DomainError("catalan_series needs 4x < 1")
    total = 0.0
    term = 1.0
    l = 0
    q = 4.0 * x
    while term * q / (1.0 - q) >= tol or l < 2:
        total += term
        term *= x * 2.0 * (2 * l + 1) / (l + 2)
        l += 1
        if l > 100_000:
            raise NumericalError("catalan_series failed to converge")
    return total + term


def _catalan_suffix(d: int, tol: float) -> np.ndarray:
    """suffix[l] = sum_{j>=l} Catalan(j) (1/d)^(j+1) ((d-1)/d)^j."""
    x = (d - 1.0) / (d * d)
    q = 4.0 * x
    terms = []
    term = 1.0 / d
    l = 0
    while term * q / (1.0 - q) >= tol or l < 2:
        terms.append(term)
        term *= x * 2.0 * (2 * l + 1) / (l + 2)
        l += 1
        if l > 200_000:
            raise NumericalError("inner series failed to converge")
    terms.append(term)
    arr = np.array(terms)
    return np.cumsum(arr[::-1])[::-1]


def profile_f_d(d: int, t: float, tail_tol: float = 1e-10) -> float:
    """Probability that two walkers started on adjacent tree vertices of
    degree d have not met by time t.

    Evaluates theta_d plus the Poisson-Catalan double series, truncating the
    Poisson tail and the inner Catalan-geometric tail below ``tail_tol``.
    """
    if d < 3:
        raise DomainError("profile_f_d needs d >= 3")
    if t < 0:
        raise DomainError("profile_f_d needs t >= 0")
    suffix = _catalan_suffix(d, tail_tol)
    L = len(suffix)
    lam = 2.0 * t
    pois = math.exp(-lam)
    cum = pois
    total = pois * suffix[0]
    k = 0
    while 1.0 - cum >= tail_tol or k < lam:
        k += 1
        pois *= lam / k
        cum += pois
        lmin = (k - 1) // 2 + 1
        if lmin < L:
            total += pois * suffix[lmin]
        if k > 10_000_000:
            raise NumericalError("Poisson tail failed to converge")
    return theta_d(d) + total


def theta_d_nu(d: int, nu: float, tol: float = 1e-12) -> float:
    """Diffusion constant of the voter model under edge rewiring at rate nu.

    The corrector is a continued fraction with terms (2 + k*nu)/rho_d,
    evaluated by backward recurrence with doubling depth.
    """
    if d < 3:
        raise DomainError("theta_d_nu needs d >= 3")
    if nu < 0:
        raise ParameterError("theta_d_nu needs nu >= 0")
    beta_d = math.sqrt(d - 1.0)
    rho_d = 2.0 * math.sqrt(d - 1.0) / d

    def backward(L: int) -> float:
        xk = (2.0 + L * nu) / rho_d
        for k in range(L - 1, 0, -1):
            xk = (2.0 + k * nu) / rho_d - 1.0 / xk
        return 1.0 / xk

    L = 32
    prev = backward(L)
    while L <= 1 << 20:
        L *= 2
        cur = backward(L)
        if abs(cur - prev) < tol:
            return 1.0 - cur / beta_d
        prev = cur
    raise NumericalError("continued fraction did not converge by depth 2^20")


def theta_directed_eulerian(m1: float, m2: float) -> float:
    """Diffusion constant for a directed graph with in-degree = out-degree,
    from the first two moments of the limiting degree law."""
    if m1 <= 1.0:
        raise DomainError("theta_directed_eulerian needs m1 > 1")
    if m2 < m1 * m1:
        raise DomainError("impossible second moment: m2 < m1^2")
    return 1.0 / (m2 / (m1 * m1) - 1.0 + math.sqrt(1.0 - 1.0 / m1))


# ---------------------------------------------------------------------------
# Fisher-Wright diffusion
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FWEnsemble:
    s: np.ndarray          # sample times
    x: np.ndarray          # (reps, len(s)) trajectories


def fw_simulate(
    theta: float,
    x0: float,
    s_max: float,
    dt: float,
    seed: int,
    reps: int,
    sample_ds: float = 0.05,
) -> FWEnsemble:
    """Euler-Maruyama for dX = sqrt(2*theta*X(1-X)) dW, clamped to [0,1] with
    absorption at the endpoints."""
    if not 0.0 <= x0 <= 1.0:
        raise ParameterError("x0 must lie in [0,1]")
    if dt > 1e-3:
        raise ParameterError("dt must be <= 1e-3")
    n_steps = int(round(s_max / dt))
    stride = max(1, int(round(sample_ds / dt)))
    state = rng.state_from(seed)
    u = np.empty(reps)
    x = np.full(reps, float(x0))
    out_s = [0.0]
    out_x = [x.copy()]
    root = math.sqrt(2.0 * theta * dt)
    for step in range(1, n_steps + 1):
        rng.fill_units(state, u)
        z = ndtri(np.clip(u, 1e-17, 1.0 - 1e-17))
        alive = (x > 0.0) & (x < 1.0)
        x[alive] = x[alive] + root * np.sqrt(x[alive] * (1.0 - x[alive])) * z[alive]
        np.clip(x, 0.0, 1.0, out=x)
        if step % stride == 0 or step == n_steps:
            out_s.append(step * dt)
            out_x.append(x.copy())
    return FWEnsemble(np.array(out_s), np.vstack(out_x).T)


# ---------------------------------------------------------------------------
# Exact birth-death oracles and lumped mean-field chains
# ---------------------------------------------------------------------------


def bd_mean_absorption(
    up_rates: Sequence[float],
    down_rates: Sequence[float],
    start: int,
    target: int,
):
    """Exact expected hitting time of ``target`` from ``start`` for a
    birth-death chain on {0..K}.

    ``up_rates[i]`` is the rate i -> i+1 (``up_rates[K]`` must be 0) and
    ``down_rates[i]`` the rate i -> i-1 (``down_rates[0]`` must be 0).
    Evaluated with mpmath via the first-step recursion, which has only
    positive terms; returns an mpmath float.  An absorbing barrier between
    start and target yields +inf.
    """
    up = [mp.mpf(r) for r in up_rates]
    down = [mp.mpf(r) for r in down_rates]
    K = len(up) - 1
    if len(down) != K + 1:
        raise ParameterError("up_rates and down_rates must have equal length")
    if up[K] != 0 or down[0] != 0:
        raise ParameterError("boundary rates must keep the chain in {0..K}")
    if not (0 <= start <= K and 0 <= target <= K):
        raise ParameterError("start/target outside the state space")
    if start == target:
        return mp.mpf(0)
    with mp.workdps(60):
        if target > start:
            # h[j] = expected time j -> j+1, built upward from the floor
            total = mp.mpf(0)
            h_prev = None
            for j in range(target):
                if up[j] == 0:
                    return mp.inf
                h = (1 + (down[j] * h_prev if j > 0 else 0)) / up[j]
                if j >= start:
                    total += h
                h_prev = h
            return total
        # g[j] = expected time j -> j-1, built downward from the ceiling
        total = mp.mpf(0)
        g_next = None
        for j in range(K, target, -1):
            if down[j] == 0:
                return mp.inf
            g = (1 + (up[j] * g_next if j < K else 0)) / down[j]
            if j <= start:
                total += g
            g_next = g
        return total


def lumped_rates(model, N: int) -> tuple[np.ndarray, np.ndarray]:
    """Exact birth-death rates of the ones-count on the complete graph.

    VM and CP lump the ones/infected count; SIM lumps the up-spin count with
    flip rates from the complete-graph Hamiltonian (callers wanting the
    mean-field normalisation pass J = 1/N).
    """
    k = np.arange(N + 1, dtype=float)
    if isinstance(model, VM):
        up = k * (N - k) / (N - 1)
        down = up.copy()
    elif isinstance(model, CP):
        up = model.lam * k * (N - k)
        down = k.copy()
    elif isinstance(model, SIM):
        S = 2 * k - N
        dh_up = -2.0 * model.J * (S + 1) - 2.0 * model.h
        dh_dn = 2.0 * model.J * (S - 1) + 2.0 * model.h
        up = (N - k) * np.exp(-model.beta * np.maximum(dh_up, 0.0))
        down = k * np.exp(-model.beta * np.maximum(dh_dn, 0.0))
    else:
        raise ParameterError(f"no lumped chain for {model!r}")
    up[N] = 0.0
    down[0] = 0.0
    return up, down


def cw_lumped_endpoints(beta: float, h: float, N: int) -> tuple[int, int]:
    """Grid states nearest the two wells of the mean-field landscape."""
    m_minus, _, m_plus = stationary_points(beta, h)
    k_minus = int(round(N * (1.0 + m_minus) / 2.0))
    k_plus = int(round(N * (1.0 + m_plus) / 2.0))
    return k_minus, k_plus


def cw_crossover_time(beta: float, h: float, N: int):
    """Exact mean well-to-well crossover time of the lumped mean-field chain."""
    up, down = lumped_rates(SIM(beta=beta, J=1.0 / N, h=h), N)
    k_minus, k_plus = cw_lumped_endpoints(beta, h, N)
    return bd_mean_absorption(up, down, k_minus, k_plus)


# ---------------------------------------------------------------------------
# Coalescence and contact-process asymptotics
# ---------------------------------------------------------------------------


def extinction_asymptotic(N: int, lam: float) -> float:
    """Central term N(1 + log(lam*N)) of the mean-field log extinction time,
    as printed in the source statement."""
    if N < 1 or lam <= 0:
        raise ParameterError("extinction_asymptotic needs N >= 1 and lam > 0")
    return N * (1.0 + math.log(lam * N))


def extinction_log_mean_field(N: int, lam: float) -> float:
    """Barrier integral N(log(lam*N) - 1) of the logistic chain.

    The exact birth-death oracle converges to this constant, not to the
    printed one: max_m sum_{i<=m} log(lam*(N-i)) = N(log(lam*N) - 1) + o(N).
    """
    if N < 1 or lam <= 0:
        raise ParameterError("extinction_log_mean_field needs N >= 1 and lam > 0")
    return N * (math.log(lam * N) - 1.0)


@dataclass(frozen=True)
class RhoExponent:
    power: float
    log_power: float


def rho_exponent(tau: float) -> RhoExponent:
    """Small-lambda density exponents for power-law degree tails."""
    if tau <= 2.0:
        raise DomainError("rho_exponent needs tau > 2")
    if tau <= 2.5:
        return RhoExponent(1.0 / (3.0 - tau), 0.0)
    if tau <= 3.0:
        return RhoExponent(2.0 * tau - 3.0, -(tau - 2.0))
    return RhoExponent(2.0 * tau - 3.0, -2.0 * (tau - 2.0))
