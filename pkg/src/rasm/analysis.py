"""Analytical ABER union bound.

The squared Euclidean distance (SED) between the noiseless receptions of
two hypotheses, ``Z = ||G_r x_k - G_rh x_kh||^2``, is approximated as a
quadratic form of a Gaussian vector and averaged through its MGF,

    PEP = (1/pi) * int_0^{pi/2} M_Z(-1 / (4 N0 sin^2 tau)) dtau,

which is then summed over all ordered hypothesis pairs weighted by the
Hamming distance of their bit words.

Two Gaussian models of the SED are available:

``"moment"`` (default)
    The full ``2*N_r``-dimensional real vector of per-antenna differences
    with mean and covariance computed exactly from the per-element moments
    of the cascaded Rayleigh channel (see :func:`sed_stats`).  Elements are
    independent, so the moments add up element by element.

``"closed_form"``
    The four-dimensional ``[q1, q2]`` model with closed-form mean and
    diagonal variances, a chi-square factor for the antennas outside both
    combinations, and the single-dimension ``Z2`` closed forms
    (:func:`z1_stats`, :func:`mgf_z1_cross`, :func:`mgf_z2`).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import InvalidInput, NumericalError
from .mapping import AcTable, AntennaCombination, SymbolMap, hamming
from .ris import element_assignment

PI = math.pi
MEAN_PRODUCT = PI / 4  # E[alpha] E[beta] for two unit-power Rayleigh gains


@dataclass(frozen=True)
class QuadraticFormStats:
    """Mean vector and covariance of the real Gaussian vector inside ``Z = ||v||^2``."""

    mu: np.ndarray
    sigma: np.ndarray
    _eig: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        mu = np.atleast_1d(np.asarray(self.mu, dtype=float))
        sigma = np.atleast_2d(np.asarray(self.sigma, dtype=float))
        if sigma.shape != (mu.size, mu.size):
            raise InvalidInput(f"covariance shape {sigma.shape} does not match mean size {mu.size}")
        scale = max(1.0, float(np.max(np.abs(sigma))))
        if np.max(np.abs(sigma - sigma.T)) > 1e-9 * scale:
            raise InvalidInput("covariance must be symmetric")
        sigma = 0.5 * (sigma + sigma.T)
        lam, vec = np.linalg.eigh(sigma)
        if lam.min() < -1e-9 * scale:
            raise InvalidInput(f"covariance is not positive semi-definite (eigenvalue {lam.min():.3g})")
        lam = np.clip(lam, 0.0, None)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "_eig", (lam, (vec.T @ mu) ** 2))

    @property
    def dim(self) -> int:
        return self.mu.size

    def mean(self) -> float:
        """``E[Z] = tr(Sigma) + |mu|^2``."""
        return float(np.trace(self.sigma) + self.mu @ self.mu)

    def mgf(self, t):
        return mgf_quadratic_gaussian(t, self)


def mgf_quadratic_gaussian(t, stats: QuadraticFormStats):
    """MGF of ``Z = sum_f X_f^2`` with ``X ~ N(mu, Sigma)``.

    Evaluated in the eigenbasis of ``Sigma``:
    ``prod_j (1 - 2 t l_j)^(-1/2) * exp(t * sum_j nu_j^2 / (1 - 2 t l_j))``
    with ``nu = V^T mu``.  This equals the usual
    ``det(I - 2 t Sigma)^(-1/2) exp(-mu^T [I - (I - 2 t Sigma)^-1] Sigma^-1 mu / 2)``
    and needs no inverse of ``Sigma``, so a singular covariance is fine: the
    mean component in its null space enters as the deterministic factor
    ``exp(t * nu^2)``.
    """
    lam, nu2 = stats._eig
    t_arr = np.asarray(t, dtype=float)
    d = 1.0 - 2.0 * t_arr[..., None] * lam
    if np.any(d <= 0):
        raise NumericalError(f"t={t} outside the MGF domain (1 - 2 t lambda <= 0)")
    out = np.exp(np.sum(-0.5 * np.log(d) + t_arr[..., None] * nu2 / d, axis=-1))
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# moment model


def _pair_moments(a: int, b: int, x: complex, y: complex, n_rx: int):
    """Mean, E[c c^H], E[c c^T] of one element's contribution to the SED vector.

    The element is aligned to antenna ``a`` under the transmitted combination
    and to ``b`` under the hypothesis; its contribution to antenna ``n`` is
    ``alpha beta_n exp(-j w_n) (x exp(j w_a) - y exp(j w_b))`` with
    independent uniform phases ``w``.
    """
    eye = np.eye(n_rx)
    w_mean = np.zeros(n_rx, dtype=complex)
    if a == b:
        w_mean[a] = x - y
        pw = abs(x - y) ** 2 * eye
        cw = np.zeros((n_rx, n_rx), dtype=complex)
        cw[a, a] = (x - y) ** 2
    else:
        w_mean[a] += x
        w_mean[b] -= y
        pw = (abs(x) ** 2 + abs(y) ** 2) * eye.astype(complex)
        pw[a, b] -= x * np.conj(y)
        pw[b, a] -= y * np.conj(x)
        cw = np.zeros((n_rx, n_rx), dtype=complex)
        cw[a, a] += x * x
        cw[b, b] += y * y
        # both x*y cross terms of (x - y e^{jd})(x e^{-jd} - y) survive the phase average
        cw[a, b] -= 2 * x * y
        cw[b, a] -= 2 * x * y
    # E[beta_n beta_m] = 1 on the diagonal, (sqrt(pi)/2)^2 off it; E[alpha^2] = 1
    mag = np.full((n_rx, n_rx), MEAN_PRODUCT)
    np.fill_diagonal(mag, 1.0)
    return MEAN_PRODUCT * w_mean, mag * pw, mag * cw


def _complex_to_real(mean, pcov, ccov):
    """Interleaved ``[Re d_1, Im d_1, Re d_2, ...]`` mean and covariance."""
    n = mean.size
    mu = np.empty(2 * n)
    mu[0::2], mu[1::2] = mean.real, mean.imag
    sigma = np.empty((2 * n, 2 * n))
    sigma[0::2, 0::2] = 0.5 * (pcov + ccov).real
    sigma[1::2, 1::2] = 0.5 * (pcov - ccov).real
    ri = 0.5 * (ccov.imag - pcov.imag)
    sigma[0::2, 1::2] = ri
    sigma[1::2, 0::2] = ri.T
    return mu, sigma


def sed_stats(ac: AntennaCombination, ac_hat: AntennaCombination, x_k: complex,
              x_khat: complex, n_res: int, n_rx: int, es: float = 1.0) -> QuadraticFormStats:
    """Gaussian (CLT) model of the per-antenna difference vector ``G_r x_k - G_rh x_kh``.

    Covers both error cases: different combinations, and the same combination
    with different symbols.  Mean and covariance are exact for the cascaded
    Rayleigh channel; only the Gaussian shape is approximate.
    """
    x, y = complex(x_k) * es, complex(x_khat) * es
    a_idx = element_assignment(n_res, ac)
    b_idx = element_assignment(n_res, ac_hat)
    mean = np.zeros(n_rx, dtype=complex)
    pcov = np.zeros((n_rx, n_rx), dtype=complex)
    ccov = np.zeros((n_rx, n_rx), dtype=complex)
    pairs, counts = np.unique(np.stack([a_idx, b_idx], axis=1), axis=0, return_counts=True)
    for (a, b), cnt in zip(pairs, counts):
        m, p, c = _pair_moments(int(a), int(b), x, y, n_rx)
        mean += cnt * m
        pcov += cnt * (p - np.outer(m, m.conj()))
        ccov += cnt * (c - np.outer(m, m))
    return QuadraticFormStats(*_complex_to_real(mean, pcov, ccov))


# ---------------------------------------------------------------------------
# four-dimensional closed-form model


def z1_stats(n_res: int, x_k: complex, x_khat: complex, n_a: int, n_e: int) -> QuadraticFormStats:
    """Mean and covariance of ``[Re q1, Im q1, Re q2, Im q2]``.

    The mean uses ``x_khat`` in the ``q2`` slots, as the SED terms require.
    Off-diagonal entries follow from the same bookkeeping as the diagonal:
    inside ``q1`` the constructive variance scales with the symbol, so
    ``Var(Re q1 + Im q1)`` gives ``cov = A * Re(x) * Im(x)``; ``q1`` and
    ``q2`` live on different antennas and are taken as uncorrelated.
    """
    x, y = complex(x_k), complex(x_khat)
    mu = n_res * PI / 4 * np.array([x.real, x.imag, -y.real, -y.imag])
    coh = n_a * (n_a - PI ** 2 / 16) * n_e
    sigma = np.zeros((4, 4))
    sigma[0, 0] = coh * x.real ** 2 + n_a * n_res * abs(y) ** 2 / 2
    sigma[1, 1] = coh * x.imag ** 2 + n_a * n_res * abs(y) ** 2 / 2
    sigma[2, 2] = coh * y.real ** 2 + n_a * n_res * abs(x) ** 2 / 2
    sigma[3, 3] = coh * y.imag ** 2 + n_a * n_res * abs(x) ** 2 / 2
    sigma[0, 1] = sigma[1, 0] = coh * x.real * x.imag
    sigma[2, 3] = sigma[3, 2] = coh * y.real * y.imag
    return QuadraticFormStats(mu, sigma)


def mgf_z1_cross(t, n_res: int, x_k: complex, x_khat: complex, n_l: int,
                 exponent: str = "shared", n_ac: int | None = None, n_a: int | None = None):
    """Chi-square factor for antennas outside both combinations.

    ``exponent="shared"`` uses ``n_l / 2`` with ``n_l`` the number of shared
    antennas; ``exponent="dof"`` uses ``(n_ac - 2) * n_a`` (needs both).
    """
    if exponent == "shared":
        power = n_l / 2
    elif exponent == "dof":
        if n_ac is None or n_a is None:
            raise InvalidInput("exponent='dof' needs n_ac and n_a")
        power = (n_ac - 2) * n_a
    else:
        raise InvalidInput(f"unknown exponent rule {exponent!r}")
    t = np.asarray(t, dtype=float)
    base = 1.0 - t * n_res * (abs(x_k) ** 2 + abs(x_khat) ** 2)
    out = base ** (-power)
    return float(out) if out.ndim == 0 else out


def z2_params(n_res: int, x_k: complex, x_khat: complex, n_a: int, n_e: int):
    """(mean, variance) of the own-antenna term and the per-dimension variance of the rest."""
    diff = abs(complex(x_k) - complex(x_khat))
    mu = n_a * n_e * PI * diff / 4
    var = diff ** 2 * n_a * n_e * (32 - PI ** 2) / 16
    rest = n_res * n_a * diff ** 2 / 2
    return mu, var, rest


def mgf_z2(t, n_res: int, n_rx: int, x_k: complex, x_khat: complex, n_a: int, n_e: int):
    """MGF of the SED when only the symbol is wrong (same combination)."""
    mu, var, rest = z2_params(n_res, x_k, x_khat, n_a, n_e)
    t = np.asarray(t, dtype=float)
    own = (1 - 2 * var * t) ** -0.5 * np.exp(t * mu ** 2 / (1 - 2 * var * t))
    others = (1 - 2 * t * rest) ** -float(n_rx - n_a)
    out = own * others
    return float(out) if out.ndim == 0 else out


def closed_form_mgf(ac, ac_hat, x_k, x_khat, n_res, n_rx, n_ac=None, exponent="shared"):
    """Callable ``t -> M_Z(t)`` for one pair under the four-dimensional model."""
    n_a = ac.size
    n_e = n_res // n_a
    if ac == ac_hat:
        return lambda t: mgf_z2(t, n_res, n_rx, x_k, x_khat, n_a, n_e)
    stats = z1_stats(n_res, x_k, x_khat, n_a, n_e)
    n_l = len(set(ac.antennas) & set(ac_hat.antennas))
    return lambda t: stats.mgf(t) * mgf_z1_cross(t, n_res, x_k, x_khat, n_l, exponent, n_ac, n_a)


# ---------------------------------------------------------------------------
# PEP and union bound


def gauss_legendre(nodes: int):
    """Nodes and weights on ``(0, pi/2)``."""
    x, w = np.polynomial.legendre.leggauss(nodes)
    return PI / 4 * (x + 1), PI / 4 * w


def _mgf_args(n0, tau):
    return -1.0 / (4.0 * np.sin(tau) ** 2 * np.asarray(n0, dtype=float)[..., None])


def pep_quadrature(mgf: Callable, n0, nodes: int = 64):
    """``(1/pi) int_0^{pi/2} M(-1/(4 sin^2(tau) N0)) dtau`` by Gauss-Legendre.

    ``n0`` may be an array; the result is clipped to ``[0, 0.5]``.
    """
    tau, w = gauss_legendre(nodes)
    t = _mgf_args(n0, tau)
    vals = np.asarray(mgf(t), dtype=float)
    if not np.all(np.isfinite(vals)):
        bad = np.argwhere(~np.isfinite(vals))[0]
        raise NumericalError(f"non-finite MGF value at tau={tau[bad[-1]]:.6g}")
    out = np.clip(vals @ w / PI, 0.0, 0.5)
    return float(out) if out.ndim == 0 else out


def pep_closed_bound(mgf: Callable, n0):
    """Three-exponential surrogate ``M(-1/N0)/6 + M(-1/(2N0))/12 + M(-1/(4N0))/4``."""
    n0 = np.asarray(n0, dtype=float)
    out = mgf(-1 / n0) / 6 + mgf(-1 / (2 * n0)) / 12 + mgf(-1 / (4 * n0)) / 4
    return float(out) if np.ndim(out) == 0 else out


@dataclass
class PepEntry:
    r: int
    k: int
    r_hat: int
    k_hat: int
    case: str
    weight: int
    pep: np.ndarray


@dataclass
class AberResult:
    snr_db: np.ndarray
    aber: np.ndarray
    model: str
    pairs: list[PepEntry] | None = None

    def records(self):
        return [{"snr_db": float(s), "aber_bound": float(a)} for s, a in zip(self.snr_db, self.aber)]


def pair_mgf(model, ac, ac_hat, x_k, x_khat, n_res, n_rx, es=1.0, n_ac=None):
    if model == "moment":
        return sed_stats(ac, ac_hat, x_k, x_khat, n_res, n_rx, es).mgf
    if model == "closed_form":
        return closed_form_mgf(ac, ac_hat, complex(x_k) * es, complex(x_khat) * es, n_res, n_rx, n_ac)
    raise InvalidInput(f"unknown model {model!r}")


def union_bound_aber(n_res: int, table: AcTable, symbols: SymbolMap, points, snr_db,
                     model: str = "moment", nodes: int = 64, es: float = 1.0,
                     method: str = "quadrature", keep_pairs: bool = False) -> AberResult:
    """Union bound on the average BER over the SNR grid ``snr_db`` (Eb/N0, dB).

    Sums ``PEP * e`` over every ordered pair of distinct (AC, symbol)
    hypotheses, ``e`` being the Hamming distance of the two bit words, and
    normalises by ``M * D * log2(M * D)``.  Pairs are visited in a fixed
    order so the floating-point sum is reproducible.
    """
    snr_db = np.atleast_1d(np.asarray(snr_db, dtype=float))
    n0 = 10.0 ** (-snr_db / 10.0)
    points = np.asarray(points, dtype=complex)
    d, m = table.size, symbols.order
    if points.size != m:
        raise InvalidInput("constellation size does not match the symbol map")
    b2 = symbols.bits
    total = np.zeros_like(n0)
    kept = [] if keep_pairs else None
    for r in range(1, d + 1):
        for r_hat in range(1, d + 1):
            for k in range(1, m + 1):
                for k_hat in range(1, m + 1):
                    if r == r_hat and k == k_hat:
                        continue
                    w = hamming(((r - 1) << b2) | symbols.word_of(k),
                                ((r_hat - 1) << b2) | symbols.word_of(k_hat))
                    mgf = pair_mgf(model, table[r], table[r_hat], points[k - 1],
                                   points[k_hat - 1], n_res, table.n_rx, es, d)
                    if method == "quadrature":
                        pep = pep_quadrature(mgf, n0, nodes)
                    elif method == "closed":
                        pep = pep_closed_bound(mgf, n0)
                    else:
                        raise InvalidInput(f"unknown PEP method {method!r}")
                    pep = np.atleast_1d(pep)
                    total = total + w * pep
                    if kept is not None:
                        kept.append(PepEntry(r, k, r_hat, k_hat,
                                             "Z2" if r == r_hat else "Z1", w, pep))
    aber = total / (m * d * math.log2(m * d))
    return AberResult(snr_db, aber, model, kept)
