"""Stationary Gaussian potential on a periodic grid, exact OU in time.

The field is kept in Fourier modes.  Mode q carries an independent complex
Gaussian amplitude of variance sigma_q^2 (Hermitian-paired so the real-space
field is real) which relaxes as an exact Ornstein-Uhlenbeck process at rate
g(q).  The discrete covariance is then exactly

    E{V(t+s, x+y) V(s, y)} = sum_q sigma_q^2 e^(-g(q) |t|) cos(q . x)

for any time step: there is no temporal discretization error by construction.

Mode variances approximate the continuum spectral measure S(q) dq/(2 pi)^d.
Two rules are provided:

    midpoint:  sigma_q^2 = S(q) / L^d        (Riemann weight, zero mode dropped)
    cell:      sigma_q^2 = (2 pi)^(-d) * Int_cell(q) S(p) dp   (d = 1 only)

The cell rule, optionally with the zero cell's mass folded onto the modes
q = +-2 pi/L (``ir_fold``), removes the O((2 pi/L)^(2-2 gamma)) infrared bias
of the midpoint rule; the singular |p|^(-(2 gamma+d-2)) density makes that
bias decay only like sqrt(2 pi/L) for gamma = 3/4.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from .media import MediumSpec, exponents
from .rng import DOMAIN_FIELD, substream

__all__ = [
    "GridSpec",
    "EffectiveMedium",
    "FieldState",
    "physical_medium",
    "rescaled_medium",
    "draw_stationary",
    "advance",
    "real_space",
    "empirical_covariance",
    "model_covariance",
    "dump_field",
    "load_field",
]


@dataclass(frozen=True)
class GridSpec:
    """Periodic grid: n points per axis (power of two, >= 8) on a torus of
    side ``length``; mode set {2 pi k / length}."""

    d: int
    n: int
    length: float

    def __post_init__(self):
        if self.d not in (1, 2, 3):
            raise ValueError("d must be 1, 2 or 3")
        if self.n < 8 or (self.n & (self.n - 1)) != 0:
            raise ValueError(f"n must be a power of two >= 8, got {self.n}")
        if not self.length > 0:
            raise ValueError("length must be positive")

    @property
    def shape(self) -> tuple:
        return (self.n,) * self.d

    @property
    def npoints(self) -> int:
        return self.n**self.d

    @property
    def dq(self) -> float:
        return 2.0 * np.pi / self.length

    @property
    def dx(self) -> float:
        return self.length / self.n

    def axis_modes(self) -> np.ndarray:
        """Mode values along one axis, FFT ordering."""
        return self.dq * (np.fft.fftfreq(self.n) * self.n)

    def mode_norm(self) -> np.ndarray:
        """|q| on the full d-dimensional mode grid."""
        ax = self.axis_modes()
        if self.d == 1:
            return np.abs(ax)
        grids = np.meshgrid(*([ax] * self.d), indexing="ij")
        return np.sqrt(sum(g * g for g in grids))

    def mode_norm2(self) -> np.ndarray:
        q = self.mode_norm()
        return q * q

    def axis_points(self) -> np.ndarray:
        return self.dx * np.arange(self.n)

    def index_of_mode(self, xi) -> tuple:
        """Grid index of the mode xi; raises if xi is not grid-aligned."""
        xi = np.atleast_1d(np.asarray(xi, dtype=float))
        if xi.size != self.d:
            raise ValueError(f"probe must have {self.d} component(s)")
        idx = []
        for comp in xi:
            k = comp / self.dq
            ki = int(np.rint(k))
            if abs(k - ki) > 1e-9 * max(1.0, abs(k)) + 1e-12:
                raise ValueError(f"frequency {comp} is not a grid mode "
                                 f"(spacing {self.dq})")
            if not -self.n // 2 <= ki < self.n // 2:
                raise ValueError(f"frequency {comp} outside the grid band")
            idx.append(ki % self.n)
        return tuple(idx)


@dataclass(frozen=True)
class EffectiveMedium:
    """Per-mode stationary variance and relaxation rate on a grid.

    ``provenance`` is "physical" or "rescaled"; the rescaled medium is the
    full modified potential (coupling strength included), so the solver
    applies it with a bare e^(-i V dt) factor.
    """

    spec: MediumSpec
    grid: GridSpec
    mode_var: np.ndarray = field(repr=False)   # sigma_q^2
    gap: np.ndarray = field(repr=False)        # g(q)
    provenance: str = "physical"
    eps: float | None = None
    alpha: float | None = None
    variance_rule: str = "midpoint"

    @property
    def total_variance(self) -> float:
        """Stationary real-space variance sum_q sigma_q^2."""
        return float(np.sum(self.mode_var))

    @property
    def max_rate(self) -> float:
        """Largest relaxation rate among modes that carry variance."""
        live = self.mode_var > 0
        if not np.any(live):
            return 0.0
        return float(np.max(self.gap[live]))


def _density_exponent(spec: MediumSpec) -> float:
    return 2.0 * spec.gamma + spec.d - 2.0


def _mode_variances(spec: MediumSpec, grid: GridSpec, prefactor: float,
                    arg_scale: float, rule: str, ir_fold: bool) -> np.ndarray:
    """sigma_q^2 for density prefactor * a(arg_scale*q) / (arg_scale*|q|)^m."""
    m = _density_exponent(spec)
    q = grid.mode_norm()
    if rule == "midpoint":
        with np.errstate(divide="ignore"):
            dens = prefactor * spec.cutoff(arg_scale * q) / (arg_scale * q) ** m
        dens[q == 0] = 0.0
        if ir_fold:
            raise ValueError("ir_fold requires the cell variance rule")
        return dens / grid.length**spec.d
    if rule != "cell":
        raise ValueError(f"unknown variance rule: {rule!r}")
    if spec.d != 1:
        raise ValueError("cell variance rule is implemented for d = 1 only")

    half = 0.5 * grid.dq

    def cell_mass(lo: float, hi: float) -> float:
        # (1/2pi) Int_lo^hi prefactor a(arg_scale p) p^(-m) (arg_scale)^(-m) dp
        lo, hi = max(lo, 0.0), max(hi, 0.0)
        if hi <= lo:
            return 0.0
        if spec.cutoff.kind == "sharp-ball":
            pcut = spec.cutoff.p_max / arg_scale
            hi = min(hi, pcut)
            if hi <= lo:
                return 0.0
            amp = spec.cutoff.amplitude_at_zero
            anti = (hi ** (1.0 - m) - lo ** (1.0 - m)) / (1.0 - m)
            return prefactor * amp * arg_scale ** (-m) * anti / (2.0 * np.pi)
        # smooth bump: substitute p = u^(1/(1-m)) if singular cell, else GL
        xg, wg = np.polynomial.legendre.leggauss(16)
        if lo > 0:
            p = lo + 0.5 * (xg + 1.0) * (hi - lo)
            w = 0.5 * (hi - lo) * wg
            vals = spec.cutoff(arg_scale * p) * p ** (-m)
        else:
            pw = 1.0 - m
            u_hi = hi**pw
            u = 0.5 * (xg + 1.0) * u_hi
            w = 0.5 * u_hi * wg / pw
            vals = spec.cutoff(arg_scale * u ** (1.0 / pw))
        return prefactor * arg_scale ** (-m) * float(w @ vals) / (2.0 * np.pi)

    qax = grid.axis_modes()
    var = np.zeros(grid.n)
    for i, qi in enumerate(qax):
        if qi == 0.0:
            continue
        aq = abs(qi)
        var[i] = cell_mass(aq - half, aq + half)
    if ir_fold:
        zero_mass = cell_mass(0.0, half)
        var[1] += zero_mass
        var[-1] += zero_mass
    return var


def physical_medium(spec: MediumSpec, grid: GridSpec, rule: str = "midpoint",
                    ir_fold: bool = False) -> EffectiveMedium:
    """Grid representation of the physical potential V."""
    if grid.d != spec.d:
        raise ValueError("grid and medium dimensions differ")
    var = _mode_variances(spec, grid, 1.0, 1.0, rule, ir_fold)
    gap = spec.mu * grid.mode_norm() ** (2.0 * spec.beta)
    return EffectiveMedium(spec=spec, grid=grid, mode_var=var, gap=gap,
                           provenance="physical", variance_rule=rule)


def rescaled_medium(spec: MediumSpec, eps: float, alpha: float,
                    grid: GridSpec, rule: str = "midpoint",
                    ir_fold: bool = False) -> EffectiveMedium:
    """Grid representation of the modified potential eps^(1-kappa) V(t/eps^kappa, x/eps^alpha).

    Mode density  S_eps(q) = eps^(2-2 kappa+alpha d) a(eps^alpha q)/(eps^alpha |q|)^(2 gamma+d-2)
    and mode rate g_eps(q) = eps^(2 alpha beta - kappa) mu |q|^(2 beta).
    At eps = 1 both reduce to the physical medium; at alpha = alpha_c the rate
    exponent is exactly zero (snapped against float round-off) so the rescaled
    gap equals the physical gap identically.
    """
    if grid.d != spec.d:
        raise ValueError("grid and medium dimensions differ")
    if not (0.0 < eps <= 1.0):
        raise ValueError(f"eps must lie in (0, 1], got {eps}")
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    ex = exponents(spec)
    pref = eps ** (2.0 - 2.0 * ex.kappa + alpha * spec.d)
    arg_scale = eps**alpha
    var = _mode_variances(spec, grid, pref, arg_scale, rule, ir_fold)
    rate_expo = 2.0 * alpha * spec.beta - ex.kappa
    if abs(rate_expo) < 1e-12:
        rate_expo = 0.0
    gap = eps**rate_expo * spec.mu * grid.mode_norm() ** (2.0 * spec.beta)
    return EffectiveMedium(spec=spec, grid=grid, mode_var=var, gap=gap,
                           provenance="rescaled", eps=eps, alpha=alpha,
                           variance_rule=rule)


@dataclass
class FieldState:
    """Fourier amplitudes of the potential at one time instant."""

    medium: EffectiveMedium
    modes: np.ndarray
    time: float
    rng: np.random.Generator

    @property
    def grid(self) -> GridSpec:
        return self.medium.grid


def _hermitian_noise(rng: np.random.Generator, grid: GridSpec) -> np.ndarray:
    """Unit-variance complex Gaussian mode array with exact Hermitian symmetry.

    FFT of white real noise: E|h_q|^2 = 1, h(-q) = conj(h(q)), and the
    self-conjugate (zero/Nyquist) modes come out real automatically.
    """
    z = rng.standard_normal(grid.shape)
    return np.fft.fftn(z) / np.sqrt(grid.npoints)


def draw_stationary(medium: EffectiveMedium, seed=None) -> FieldState:
    """Draw the field from its stationary law.

    ``seed`` may be an integer (a dedicated substream is derived from it) or
    an existing Generator whose stream the state will consume.
    """
    rng = seed if isinstance(seed, np.random.Generator) else \
        substream(0 if seed is None else int(seed), DOMAIN_FIELD)
    sigma = np.sqrt(medium.mode_var)
    modes = sigma * _hermitian_noise(rng, medium.grid)
    return FieldState(medium=medium, modes=modes, time=0.0, rng=rng)


def advance(state: FieldState, dt: float) -> FieldState:
    """Exact OU step: amplitude <- e^(-g dt) amplitude + sqrt(1-e^(-2 g dt)) sigma xi.

    Stationarity is preserved exactly for any dt >= 0; the lagged mode
    correlation is e^(-g(q) dt).  Mutates and returns ``state``.
    """
    if dt < 0:
        raise ValueError(f"dt must be nonnegative, got {dt}")
    if dt == 0:
        return state
    decay = np.exp(-state.medium.gap * dt)
    fresh = _hermitian_noise(state.rng, state.grid)
    sigma = np.sqrt(state.medium.mode_var)
    state.modes *= decay
    state.modes += np.sqrt(1.0 - decay * decay) * sigma * fresh
    state.time += dt
    return state


def real_space(state: FieldState) -> np.ndarray:
    """Field values on the grid; imaginary residue is checked and dropped."""
    vals = np.fft.ifftn(state.modes) * state.grid.npoints
    scale = np.max(np.abs(vals)) or 1.0
    if np.max(np.abs(vals.imag)) > 1e-10 * scale:
        raise RuntimeError("field lost Hermitian symmetry")
    return vals.real


def model_covariance(medium: EffectiveMedium, lags) -> np.ndarray:
    """Exact covariance of the discrete field: sum_q sigma_q^2 e^(-g t) cos(q.x).

    This is the mode-sum oracle the empirical estimates are checked against.
    ``lags`` is a sequence of (t, x) pairs; x is a scalar (d=1) or vector.
    """
    grid = medium.grid
    ax = grid.axis_modes()
    out = []
    for t, x in lags:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if grid.d == 1:
            phase = np.cos(ax * x[0])
        else:
            grids = np.meshgrid(*([ax] * grid.d), indexing="ij")
            phase = np.cos(sum(g * xi for g, xi in zip(grids, x)))
        out.append(float(np.sum(medium.mode_var * np.exp(-medium.gap * abs(t)) * phase)))
    return np.array(out)


def empirical_covariance(medium: EffectiveMedium, n_samples: int, lags,
                         seed: int = 0):
    """Monte Carlo estimate of R(t, x) at the requested lags.

    Each sample draws a stationary state, advances it through the sorted time
    lags, and correlates with the initial snapshot; spatial shifts use the
    torus translation.  Returns (estimates, standard errors).
    """
    if n_samples < 100:
        raise ValueError("need at least 100 samples")
    grid = medium.grid
    lags = [(float(t), np.atleast_1d(np.asarray(x, dtype=float))) for t, x in lags]
    shifts = []
    for _, x in lags:
        sh = x / grid.dx
        shi = np.rint(sh).astype(int)
        if np.max(np.abs(sh - shi)) > 1e-9:
            raise ValueError("spatial lag must be a grid shift")
        shifts.append(tuple(shi))
    order = np.argsort([t for t, _ in lags], kind="stable")

    acc = np.zeros((n_samples, len(lags)))
    for i in range(n_samples):
        state = draw_stationary(medium, substream(seed, DOMAIN_FIELD, i))
        v0 = real_space(state)
        for j in order:
            t, _ = lags[j]
            if state.time < t:
                advance(state, t - state.time)
            vt = real_space(state) if t > 0 else v0
            shifted = np.roll(vt, shift=shifts[j],
                              axis=tuple(range(grid.d)))
            acc[i, j] = np.mean(v0 * shifted)
    est = acc.mean(axis=0)
    se = acc.std(axis=0, ddof=1) / np.sqrt(n_samples)
    return est, se


_MAGIC = b"RSFD"
_VERSION = 1


def dump_field(state: FieldState, path) -> None:
    """Binary snapshot: little-endian header (magic, version, d, n, length,
    time) followed by the complex128 mode array in C order."""
    with open(path, "wb") as fh:
        g = state.grid
        fh.write(_MAGIC)
        fh.write(struct.pack("<IIIdd", _VERSION, g.d, g.n, g.length, state.time))
        fh.write(np.ascontiguousarray(state.modes.astype("<c16")).tobytes())


def load_field(medium: EffectiveMedium, path,
               rng: np.random.Generator | None = None) -> FieldState:
    """Rehydrate a snapshot written by :func:`dump_field`."""
    with open(path, "rb") as fh:
        if fh.read(4) != _MAGIC:
            raise ValueError("not a field snapshot")
        ver, d, n, length, time = struct.unpack("<IIIdd", fh.read(28))
        if ver != _VERSION:
            raise ValueError(f"unsupported snapshot version {ver}")
        g = medium.grid
        if (d, n) != (g.d, g.n) or abs(length - g.length) > 1e-12 * g.length:
            raise ValueError("snapshot grid does not match the medium grid")
        raw = np.frombuffer(fh.read(), dtype="<c16").reshape(g.shape)
    return FieldState(medium=medium, modes=raw.astype(np.complex128),
                      time=time, rng=rng or substream(0, DOMAIN_FIELD))
