"""Independent series oracle: Wick pairings and term-by-term limits.

Joint moments of the compensated wave function expand into a sum over
perfect matchings ("pairings") of the potential insertions.  In the limit
each pairing contributes a simplex integral of a product of one-edge
kernels:

    no-phase regimes:   (a(0) K1/(2 pi)^d)^k * Int_simplex prod |v_l - v_r|^(-a)
    xi-phase regime:    a(0)^k * Int_simplex prod |v_l - v_r|^(-a) K2(|v_l-v_r|, xi)

with a = (1-gamma)/beta.  Summing a fixed k over all pairings collapses, by
symmetry, to ((2k-1)!!/(2k)!) (Int_[0,t]^2 ...)^k per time simplex, which is
what the partial-sum assembler uses; the Monte Carlo simplex integrals are
kept as the independent check of exactly that collapse.

The module is deliberately redundant with the closed-form predictions in
:mod:`randschrod.constants`: agreement between the two routes is the point.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from .constants import OMEGA_D, _jacobi_01, _radial_kernel_vec, k1
from .media import MediumSpec, exponents
from .rng import DOMAIN_ORACLE, substream
from .solver import InitialPacket

__all__ = [
    "Pairing",
    "pairings",
    "label_vertices",
    "limit_term",
    "limit_term_xi",
    "simplex_pairing_integral",
    "symmetrized_pairing_sum",
    "box2",
    "xi_box2",
    "SeriesTerm",
    "series_terms",
    "moment_partial_sum",
    "resummed_moment",
    "finite_eps_first_term",
    "uniform_bound_integral",
    "crossing_first_order",
]


# ---------------------------------------------------------------------------
# pairings
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Pairing:
    """Perfect matching of 2k labeled vertices (vertex 0 carries the largest
    time on the descending simplex)."""

    edges: tuple

    @property
    def order(self) -> int:
        return 2 * len(self.edges)

    def is_crossing(self, conjugated) -> bool:
        """True if any edge joins an unconjugated and a conjugated vertex."""
        return any(conjugated[i] != conjugated[j] for i, j in self.edges)


def pairings(two_k: int) -> list:
    """All (2k-1)!! perfect matchings of {0, ..., 2k-1}.

    Odd joint Gaussian moments vanish, so odd inputs are rejected; the
    enumeration is exhaustive and duplicate-free.
    """
    if two_k <= 0 or two_k % 2:
        raise ValueError(f"need a positive even vertex count, got {two_k}")
    if two_k > 8:
        raise ValueError("pairing enumeration is desk-scale: 2k <= 8")

    def rec(items):
        if not items:
            yield ()
            return
        first, rest = items[0], items[1:]
        for i, other in enumerate(rest):
            head = (first, other)
            for tail in rec(rest[:i] + rest[i + 1:]):
                yield (head,) + tail

    return [Pairing(edges=e) for e in rec(tuple(range(two_k)))]


def label_vertices(orders_m, orders_n) -> tuple:
    """Conjugation flags for the vertex list of a product moment.

    Factors contribute their insertion counts in order: unconjugated factors
    (orders_m) first, then conjugated ones (orders_n).
    """
    flags = []
    for m in orders_m:
        flags.extend([False] * m)
    for n in orders_n:
        flags.extend([True] * n)
    return tuple(flags)


# ---------------------------------------------------------------------------
# simplex integrals
# ---------------------------------------------------------------------------

def box2(spec: MediumSpec, t: float) -> float:
    """Int_[0,t]^2 |s-u|^(-a) ds du = 2 t^(2-a) / ((1-a)(2-a))."""
    a = exponents(spec).a_sing
    return 2.0 * t ** (2.0 - a) / ((1.0 - a) * (2.0 - a))


def _gap_matrix(edges, two_k: int) -> np.ndarray:
    """Edge-by-gap incidence: |v_i - v_j| = sum of gaps i..j-1."""
    inc = np.zeros((len(edges), two_k - 1))
    for row, (i, j) in enumerate(edges):
        lo, hi = min(i, j), max(i, j)
        inc[row, lo:hi] = 1.0
    return inc


def simplex_pairing_integral(edges, a: float, t: float, n_mc: int = 200_000,
                             seed: int = 0, n_batches: int = 32,
                             kernel=None):
    """Monte Carlo estimate of Int_{t >= s_1 >= ... >= s_2k >= 0}
    prod_edges f(|v_l - v_r|) ds with f(l) = l^(-a) [* kernel(l)].

    Gaps are importance-sampled from the density proportional to g^(-a),
    which keeps the estimator variance finite despite the squared integrand
    being borderline non-integrable on adjacent edges.  Returns
    (estimate, stderr) via batch means.
    """
    two_k = 2 * len(edges)
    if two_k == 2 and kernel is None:
        return t ** (2.0 - a) / ((1.0 - a) * (2.0 - a)), 0.0
    inc = _gap_matrix(edges, two_k)
    rng = substream(seed, DOMAIN_ORACLE)
    n_g = two_k - 1
    p = 1.0 / (1.0 - a)
    base = (t ** (1.0 - a) / (1.0 - a)) ** n_g
    per_batch = max(1, n_mc // n_batches)
    means = np.empty(n_batches)
    for b in range(n_batches):
        v = rng.random((per_batch, n_g))
        g = t * v**p
        s = g.sum(axis=1)
        alive = s <= t
        lam = g @ inc.T                       # (n, n_edges) edge lengths
        with np.errstate(divide="ignore"):
            f = np.prod(np.where(lam > 0, lam, 1.0) ** (-a), axis=1)
        if kernel is not None:
            f = f * np.prod(kernel(np.maximum(lam, 1e-300)), axis=1)
        w = np.where(alive, (t - s) * np.prod(g**a, axis=1) * base * f, 0.0)
        means[b] = w.mean()
    est = float(means.mean())
    se = float(means.std(ddof=1) / np.sqrt(n_batches))
    return est, se


def symmetrized_pairing_sum(spec: MediumSpec, two_k: int, t: float,
                            n_mc: int = 200_000, seed: int = 0):
    """sum over pairings of Int_simplex prod |v_l-v_r|^(-a), with stderr.

    The symmetrization identity says this equals ((2k-1)!!/(2k)!) box2^k.
    """
    a = exponents(spec).a_sing
    tot, var = 0.0, 0.0
    for i, pr in enumerate(pairings(two_k)):
        est, se = simplex_pairing_integral(pr.edges, a, t, n_mc=n_mc,
                                           seed=seed + 1000 * i)
        tot += est
        var += se * se
    return tot, math.sqrt(var)


def limit_term(spec: MediumSpec, pairing: Pairing, t: float,
               n_mc: int = 200_000, seed: int = 0):
    """Limit value of one pairing's contribution to a no-phase moment:
    (a(0) K1/(2 pi)^d)^k * simplex integral.  Returns (value, stderr)."""
    k = len(pairing.edges)
    a = exponents(spec).a_sing
    coef = (spec.cutoff.amplitude_at_zero * k1(spec)
            / (2.0 * np.pi) ** spec.d) ** k
    est, se = simplex_pairing_integral(pairing.edges, a, t, n_mc=n_mc, seed=seed)
    return coef * est, coef * se


def _xi_kernel_interp(spec: MediumSpec, xi: float, t: float, n: int = 512):
    """Fast K2(l, xi) on l in (0, t] via interpolation in the smooth variable
    u = l^e (the kernel argument is linear in u)."""
    e = 1.0 - 1.0 / (2.0 * spec.beta)
    u = np.linspace(0.0, t**e, n)
    vals = _radial_kernel_vec(spec, abs(xi) * u)

    def kernel(lam):
        return np.interp(np.asarray(lam) ** e, u, vals)

    return kernel


def limit_term_xi(spec: MediumSpec, pairing: Pairing, t: float, xi: float,
                  n_mc: int = 200_000, seed: int = 0):
    """Limit value of one pairing's contribution in the xi-phase regime:
    a(0)^k * Int_simplex prod |v|^(-a) K2(|v|, xi).  Requires beta > 1/2."""
    if spec.beta <= 0.5:
        raise ValueError("the xi-phase limit exists only for beta > 1/2")
    k = len(pairing.edges)
    a = exponents(spec).a_sing
    a0 = spec.cutoff.amplitude_at_zero
    if k == 1:
        # exact 1-d quadrature: a0 * Int_0^t (t-l) l^(-a) K2(l, xi) dl
        val = a0 * xi_box2(spec, t, xi) / 2.0
        return val, 1e-9 * abs(val)
    kern = _xi_kernel_interp(spec, xi, t)
    est, se = simplex_pairing_integral(pairing.edges, a, t, n_mc=n_mc,
                                       seed=seed, kernel=kern)
    return a0**k * est, a0**k * se


def xi_box2(spec: MediumSpec, t: float, xi: float, n_nodes: int = 128) -> float:
    """Int_[0,t]^2 |s-u|^(-a) K2(|s-u|, xi) ds du.

    Same cube-root-type substitution as the D(t, xi) quadrature: with
    r = v^(1/e), e = 1 - 1/(2 beta), the K2 argument is linear in v.
    """
    a = exponents(spec).a_sing
    e = 1.0 - 1.0 / (2.0 * spec.beta)
    if xi == 0.0 or e == 0.0:
        r = abs(xi)
        const = _radial_kernel_vec(spec, np.array([r]))[0]
        return const * box2(spec, t)
    if e < 0.0:
        raise ValueError("xi-phase kernel requires beta >= 1/2")
    c = abs(xi) * t**e
    total = 0.0
    for power, sign in ((1.0 - a, 1.0), (2.0 - a, -1.0)):
        b = power / e - 1.0
        n = int(max(n_nodes, 4 * c / np.pi))
        v, w = _jacobi_01(min(n, 4000), b)
        vals = _radial_kernel_vec(spec, c * v)
        total += sign * (1.0 / e) * float(w @ vals)
    return t ** (2.0 - a) * 2.0 * total


# ---------------------------------------------------------------------------
# assembled series
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SeriesTerm:
    """One composition's assembled contribution to a joint moment."""

    orders_m: tuple
    orders_n: tuple
    k: int
    value: complex
    mode: str


def _compositions(total: int, parts: int):
    if parts == 0:
        if total == 0:
            yield ()
        return
    for head in range(total + 1):
        for tail in _compositions(total - head, parts - 1):
            yield (head,) + tail


def _double_factorial(two_k: int) -> int:
    # verified against len(pairings(2k)) in the tests
    out = 1
    for i in range(1, two_k, 2):
        out *= i
    return out


def _series_base(spec: MediumSpec, t: float, mode: str, xi) -> float:
    a0 = spec.cutoff.amplitude_at_zero
    if mode == "limit-nophase":
        return a0 * k1(spec) / (2.0 * np.pi) ** spec.d * box2(spec, t)
    if mode == "limit-xi-phase":
        if xi is None:
            raise ValueError("xi-phase mode needs a probe frequency")
        if spec.beta <= 0.5:
            raise ValueError("the xi-phase limit exists only for beta > 1/2")
        return a0 * xi_box2(spec, t, xi)
    raise ValueError(f"unknown series mode {mode!r}")


def series_terms(spec: MediumSpec, M: int, N: int, t: float, K_max: int,
                 mode: str = "limit-nophase", xi=None,
                 phi0_hat: complex = 1.0) -> list:
    """Assembled limit terms for all insertion-count compositions with
    sum(m) + sum(n) = 2k, k <= K_max.

    Each composition contributes
        i^(-sum m) (-i)^(-sum n) (2k-1)!!/(prod m_i! n_j!) base^k
    times the initial-data powers; the multinomial collapse of the pairing
    sum over the product simplex is baked in (and spot-checked by Monte
    Carlo elsewhere).
    """
    if K_max < 0 or K_max > 4:
        raise ValueError("K_max must lie in 0..4")
    if M < 0 or N < 0 or M + N == 0:
        raise ValueError("need nonnegative orders with M+N >= 1")
    base = _series_base(spec, t, mode, xi)
    amp = phi0_hat**M * np.conj(phi0_hat) ** N
    out = [SeriesTerm(orders_m=(0,) * M, orders_n=(0,) * N, k=0,
                      value=complex(amp), mode=mode)]
    for k in range(1, K_max + 1):
        dfact = _double_factorial(2 * k)
        for comp in _compositions(2 * k, M + N):
            m, n = comp[:M], comp[M:]
            phase = (1j) ** (-sum(m)) * (-1j) ** (-sum(n))
            denom = 1.0
            for c in comp:
                denom *= math.factorial(c)
            val = phase * dfact / denom * base**k * amp
            out.append(SeriesTerm(orders_m=m, orders_n=n, k=k,
                                  value=complex(val), mode=mode))
    return out


def moment_partial_sum(spec: MediumSpec, M: int, N: int, t: float, K_max: int,
                       mode: str = "limit-nophase", xi=None,
                       phi0_hat: complex = 1.0) -> complex:
    """Partial sum over k <= K_max of the assembled limit terms.

    Matches the Taylor truncation of the predicted exponential, e.g.
    sum_k (-(M-N)^2 base/2)^k / k! for the no-phase regimes.
    """
    terms = series_terms(spec, M, N, t, K_max, mode, xi, phi0_hat)
    return complex(sum(tm.value for tm in terms))


def resummed_moment(spec: MediumSpec, M: int, N: int, t: float,
                    mode: str = "limit-nophase", xi=None,
                    phi0_hat: complex = 1.0, tol: float = 1e-14) -> complex:
    """Numerically resummed series (k until the term drops below tol)."""
    base = _series_base(spec, t, mode, xi)
    amp = phi0_hat**M * np.conj(phi0_hat) ** N
    x = 0.5 * (M - N) ** 2 * base
    total, term = 1.0, 1.0
    for k in range(1, 400):
        term *= -x / k
        total += term
        if abs(term) < tol:
            break
    return complex(amp * total)


# ---------------------------------------------------------------------------
# finite-eps first-order term and the uniform bound
# ---------------------------------------------------------------------------

def _graded_time_nodes(a: float, t: float, n: int):
    """Nodes/weights for Int_0^t (t-l) h(l) dl with h ~ l^(-a) near 0."""
    p = 1.0 / (1.0 - a)
    x, w = np.polynomial.legendre.leggauss(n)
    v = 0.5 * (x + 1.0)
    lam = t * v**p
    wgt = 0.5 * w * t * p * v ** (p - 1.0)
    return lam, wgt


def finite_eps_first_term(spec: MediumSpec, eps: float, alpha: float,
                          t: float, xi, phi0_hat: complex,
                          suppress_phase: bool = False,
                          force_a0: bool = False, n_time: int = 128) -> complex:
    """The k=1 term of E psi at finite eps (rescaled variables).

    value = -phi0_hat * (Omega_d/(2 pi)^d) * Int_0^t (t-l)
              Int_0^inf e^(-mu w^(2 beta) l) w^(1-2 gamma) a(eps^alpha_c w)
                e^(-i eps^(2 alpha_c - kappa) w^2 l / 2)
                kernel_d(eps^(alpha + alpha_c - kappa) |xi| w l) dw dl

    Converges to -(D/2) t^(2/kappa) phi0_hat for alpha > alpha_c as eps -> 0;
    ``suppress_phase``/``force_a0`` reduce it to that limit exactly (used by
    the reduction tests).
    """
    if t == 0:
        return 0.0 + 0.0j
    if not (0.0 < eps <= 1.0):
        raise ValueError("eps must lie in (0, 1]")
    ex = exponents(spec)
    d, g, mu, tb = spec.d, spec.gamma, spec.mu, 2.0 * spec.beta
    xin = float(np.sqrt(np.sum(np.atleast_1d(np.asarray(xi, dtype=float)) ** 2)))
    c_quad = eps ** (2.0 * ex.alpha_c - ex.kappa)
    c_lin = eps ** (alpha + ex.alpha_c - ex.kappa) * xin

    def angular(x):
        if d == 1:
            return np.cos(x)
        if d == 2:
            return special.j0(x)
        return np.sinc(x / np.pi)

    if force_a0:
        def amp(w):
            return spec.cutoff.amplitude_at_zero * np.ones_like(w)
        w_hi_cut = np.inf
    else:
        def amp(w):
            return spec.cutoff(eps**ex.alpha_c * w)
        w_hi_cut = spec.cutoff.p_max / eps**ex.alpha_c

    lam, wgt = _graded_time_nodes(ex.a_sing, t, n_time)
    inner = np.empty(lam.size, dtype=np.complex128)
    for i, l in enumerate(lam):
        # integrate in u = w (mu l)^(1/(2 beta)): the exponential becomes
        # e^(-u^(2 beta)) on a bounded domain for every l
        s = (mu * l) ** (1.0 / tb)
        u_cap = min(w_hi_cut * s, 42.0 ** (1.0 / tb))

        def f(u, part, with_weight):
            w = u / s
            val = np.exp(-u**tb) * amp(w)
            if with_weight:
                val = val * u ** (1.0 - 2.0 * g)
            if suppress_phase:
                return val if part == "re" else 0.0 * val
            val = val * angular(c_lin * w * l)
            ph = -0.5 * c_quad * w * w * l
            return val * (np.cos(ph) if part == "re" else np.sin(ph))

        wc = u_cap / s
        osc = c_quad * wc * wc * l / (2.0 * np.pi) + c_lin * wc * l / np.pi
        lim = int(min(800, max(150, 12 * osc)))
        u_mid = min(1.0, u_cap)
        parts = ["re"] if suppress_phase else ["re", "im"]
        vals = {}
        for part in parts:
            # u^(1-2 gamma) endpoint weight via the algebraic rule
            v, _ = integrate.quad(lambda u: f(u, part, False), 0.0, u_mid,
                                  weight="alg", wvar=(1.0 - 2.0 * g, 0.0),
                                  limit=lim)
            if u_cap > u_mid:
                tail, _ = integrate.quad(lambda u: f(u, part, True),
                                         u_mid, u_cap, limit=lim)
                v += tail
            vals[part] = v
        inner[i] = (vals["re"] + 1j * vals.get("im", 0.0)) * s ** (2.0 * g - 2.0)
    core = np.sum(wgt * (t - lam) * inner)
    return -phi0_hat * OMEGA_D[d] / (2.0 * np.pi) ** d * core


def uniform_bound_integral(spec: MediumSpec, eps: float, t: float,
                           n_nodes: int = 160) -> float:
    """The per-edge bracket of the term-wise moment bound:

        eps^(2-2 kappa) Int_[0,t]^2 Int e^(-g(w)|s-u|/eps^kappa) Rhat(w)
            dw/(2 pi)^d ds du
        = Int_[0,t]^2 |s-u|^(-a) inner(|s-u|, eps) ds du,

    where inner carries the rescaled cutoff and increases to
    a(0) K1/(2 pi)^d as eps -> 0, so the whole expression is bounded by
    (sup a / a(0)) D t^(2/kappa) and nondecreasing as eps decreases.
    """
    if t == 0:
        return 0.0
    if not (0.0 < eps <= 1.0):
        raise ValueError("eps must lie in (0, 1]")
    ex = exponents(spec)
    a = ex.a_sing
    mu, tb = spec.mu, 2.0 * spec.beta
    pref = OMEGA_D[spec.d] / (2.0 * np.pi) ** spec.d

    if spec.cutoff.kind == "sharp-ball":
        amp0 = spec.cutoff.amplitude_at_zero
        gnorm = special.gamma(a)

        def inner(lam):
            arg = mu * spec.cutoff.p_max**tb * lam / eps**ex.kappa
            return amp0 / (tb * mu**a) * gnorm * special.gammainc(a, arg)
    else:
        def inner(lam):
            lam = np.atleast_1d(lam)
            out = np.empty(lam.size)
            scale = (eps**ex.kappa / lam) ** (1.0 / tb)
            for i, s in enumerate(scale):
                val, _ = integrate.quad(
                    lambda r: np.exp(-mu * r**tb) * r ** (1.0 - 2.0 * spec.gamma)
                    * spec.cutoff(s * r), 0.0, _ubi_cap(spec), limit=200)
                out[i] = val
            return out

    # 2 Int_0^t (t-l) l^(-a) inner(l) dl via the Jacobi rule on [0,1]
    v, w = _jacobi_01(n_nodes, -a)
    lam = t * v
    vals = inner(lam)
    return float(pref * 2.0 * t ** (2.0 - a) * np.sum(w * (1.0 - v) * vals))


def _ubi_cap(spec: MediumSpec) -> float:
    return (42.0 / spec.mu) ** (1.0 / (2.0 * spec.beta))


def crossing_first_order(spec: MediumSpec, eps: float, alpha: float, t: float,
                         xi: float, packet: InitialPacket,
                         n_nodes: int = 2000) -> float:
    """k=1 crossing contribution to E|psi_eps|^2 (d = 1).

    The single mixed edge forces equal momenta on both insertions, so the
    initial-data factor is |phi0_hat(xi - eps^(alpha_c-alpha) w)|^2; the free
    phases combine into a closed-form time factor.  The magnitude decreases
    in eps in the homogenized regime, which is the vanishing of the crossing
    pairings that makes the limit deterministic.
    """
    if spec.d != 1:
        raise ValueError("crossing diagnostic implemented for d = 1")
    ex = exponents(spec)
    shift = eps ** (ex.alpha_c - alpha)
    c_quad = eps ** (2.0 * ex.alpha_c - ex.kappa)
    c_lin = eps ** (alpha + ex.alpha_c - ex.kappa) * xi

    cap = spec.cutoff.p_max / eps**ex.alpha_c

    def half(sign):
        # substitution w = u^(1/(2-2 gamma)) removes the |w|^(1-2g) weight
        p = 2.0 - 2.0 * spec.gamma
        x, wq = np.polynomial.legendre.leggauss(n_nodes)
        u = 0.5 * (x + 1.0) * cap**p
        wgt = 0.5 * wq * cap**p / p
        w = u ** (1.0 / p)
        gap = spec.mu * w ** (2.0 * spec.beta)
        theta = c_lin * w - 0.5 * c_quad * w * w
        z = -gap + 1j * theta
        zt = z * t
        small = np.abs(zt) < 1e-4
        zs = np.where(small, 1.0, z)
        tfac = 2.0 * np.real((np.exp(zs * t) - 1.0 - zs * t) / (zs * zs))
        tfac = np.where(small, t * t * np.real(1.0 + zt / 3.0), tfac)
        h = np.abs(packet.fourier_vec(xi - sign * shift * w)) ** 2
        aw = spec.cutoff(eps**ex.alpha_c * w)
        return np.sum(wgt * aw * h * tfac)

    return (half(+1) + half(-1)) / (2.0 * np.pi)
