"""Two planar measures built from the Fejer kernel whose convolution powers
agree on the open right half-plane although the measures differ.

Each measure is a sum of point masses in ``x`` times sampled densities in
``y``.  Densities share one uniform grid, so the ``y``-convolutions reduce to
zero-padded FFT products.  Fourier convention: an ``x``-atom at ``x0``
contributes ``exp(-i*s*x0)`` and a density ``f`` contributes
``int f(y) exp(-i*t*y) dy``; under it the Fejer kernel transforms to the
triangle ``max(1 - |t|, 0)``.
"""

from __future__ import annotations

import csv
import logging
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np
import scipy.fft as sfft

from .errors import GridOverflow

log = logging.getLogger(__name__)

DEFAULT_MAX_SAMPLES = 1 << 23


def fejer_kernel(y):
    """``(1/2pi) * (sin(y/2) / (y/2))**2``, equal to ``1/2pi`` at ``y = 0``."""
    return np.sinc(np.asarray(y, dtype=float) / (2 * np.pi)) ** 2 / (2 * np.pi)


@dataclass(frozen=True)
class GridSpec:
    L: float = 200.0
    N: int = 1 << 16

    def __post_init__(self):
        if self.L <= 0:
            raise ValueError("grid half-width must be positive")
        if self.N < 2 or self.N & (self.N - 1):
            raise ValueError(f"sample count must be a power of two, got {self.N}")

    @property
    def dy(self) -> float:
        return 2 * self.L / self.N

    def points(self) -> np.ndarray:
        return -self.L + self.dy * np.arange(self.N)


@dataclass(frozen=True)
class GridDensity:
    """Density samples ``values[j]`` at ``y0 + j*dy``."""

    y0: float
    dy: float
    values: np.ndarray

    def __post_init__(self):
        if self.dy <= 0:
            raise ValueError("grid step must be positive")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("density samples must be finite")

    @property
    def y(self) -> np.ndarray:
        return self.y0 + self.dy * np.arange(len(self.values))

    def l1_mass(self) -> float:
        return trapezoid(np.abs(self.values), self.dy)

    def mass(self) -> float:
        return trapezoid(self.values, self.dy)

    def transform(self, t) -> np.ndarray:
        """Trapezoid rule for ``int f(y) exp(-i t y) dy`` at the frequencies ``t``."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        y = self.y
        w = np.full(len(y), self.dy)
        w[0] = w[-1] = self.dy / 2
        fw = self.values * w
        return np.array([np.dot(fw, np.exp(-1j * tk * y)) for tk in t])


def trapezoid(values: np.ndarray, dy: float) -> float:
    if len(values) < 2:
        return float(np.sum(values) * dy)
    return float(dy * (np.sum(values) - 0.5 * (values[0] + values[-1])))


@dataclass
class ProductMeasure2D:
    """``sum_x delta_x (dx) (x) f_x(y) dy`` with all densities on a common grid."""

    atoms: dict
    y0: float
    dy: float
    pruned: dict = field(default_factory=dict)

    def __post_init__(self):
        self.atoms = {Fraction(x): np.asarray(v, dtype=float) for x, v in sorted(self.atoms.items())}
        lengths = {len(v) for v in self.atoms.values()}
        if len(lengths) > 1:
            raise ValueError("densities must share one grid")

    @property
    def locations(self) -> list[Fraction]:
        return sorted(self.atoms)

    @property
    def n_samples(self) -> int:
        return len(next(iter(self.atoms.values()))) if self.atoms else 0

    @property
    def y(self) -> np.ndarray:
        return self.y0 + self.dy * np.arange(self.n_samples)

    def density(self, x) -> GridDensity:
        return GridDensity(self.y0, self.dy, self.atoms[Fraction(x)])

    def restrict_x(self, predicate) -> "ProductMeasure2D":
        return ProductMeasure2D({x: v for x, v in self.atoms.items() if predicate(x)}, self.y0, self.dy)


def build_measure(weights: dict, grid: GridSpec) -> ProductMeasure2D:
    """``weights`` maps an ``x`` location to a modulation frequency (``None`` for plain ``F``)."""
    y = grid.points()
    F = fejer_kernel(y)
    atoms = {}
    for x, freq in weights.items():
        atoms[x] = F.copy() if freq is None else 2 * np.cos(freq * y) * F
    return ProductMeasure2D(atoms, float(y[0]), grid.dy)


def build_mu(grid: GridSpec, location=-3, frequency: float = 2.0) -> ProductMeasure2D:
    return build_measure({1: None, location: frequency}, grid)


def build_nu(grid: GridSpec, location=-2, frequency: float = 10.0) -> ProductMeasure2D:
    return build_measure({1: None, location: frequency}, grid)


def _linear_convolve_spectra(P: ProductMeasure2D, Q: ProductMeasure2D, max_samples: int):
    n = P.n_samples + Q.n_samples - 1
    if n > max_samples:
        raise GridOverflow(f"convolution needs {n} samples, budget is {max_samples}")
    nfft = sfft.next_fast_len(n, real=True)
    spec_p = {x: sfft.rfft(v, nfft) for x, v in P.atoms.items()}
    spec_q = spec_p if Q is P else {x: sfft.rfft(v, nfft) for x, v in Q.atoms.items()}
    return n, nfft, spec_p, spec_q


def convolve_products(
    P: ProductMeasure2D,
    Q: ProductMeasure2D,
    prune_below: float = 0.0,
    max_samples: int = DEFAULT_MAX_SAMPLES,
) -> ProductMeasure2D:
    """Convolution of two product measures; ``x``-atoms whose density has L1 mass
    below ``prune_below`` are dropped and their masses recorded in ``pruned``."""
    if not math.isclose(P.dy, Q.dy, rel_tol=1e-12):
        raise ValueError("product measures live on different grid steps")
    n, nfft, spec_p, spec_q = _linear_convolve_spectra(P, Q, max_samples)
    acc: dict = {}
    for xp, fp in spec_p.items():
        for xq, fq in spec_q.items():
            x = xp + xq
            acc[x] = acc[x] + fp * fq if x in acc else fp * fq
    atoms, pruned = {}, {}
    for x in sorted(acc):
        dens = sfft.irfft(acc[x], nfft)[:n] * P.dy
        mass = trapezoid(np.abs(dens), P.dy)
        if mass < prune_below:
            pruned[x] = mass
        else:
            atoms[x] = dens
    if pruned:
        log.info("pruned x-atoms %s", {str(k): f"{v:.3g}" for k, v in pruned.items()})
    return ProductMeasure2D(atoms, P.y0 + Q.y0, P.dy, pruned)


def _window(P: ProductMeasure2D, half_width: float) -> ProductMeasure2D:
    y = P.y
    keep = (y >= -half_width - P.dy / 2) & (y <= half_width + P.dy / 2)
    if keep.all():
        return P
    first = int(np.argmax(keep))
    return ProductMeasure2D({x: v[keep] for x, v in P.atoms.items()}, float(y[first]), P.dy, P.pruned)


def product_powers(
    P: ProductMeasure2D,
    k_max: int,
    prune_below: float = 0.0,
    window_cap: int = 8,
    max_samples: int = DEFAULT_MAX_SAMPLES,
) -> list[ProductMeasure2D]:
    """``[P, P^{*2}, ..., P^{*k_max}]`` by repeated convolution with ``P``.

    The power ``k`` lives on ``[-k*L, k*L]``; past ``window_cap`` factors the
    support is cut back to ``[-window_cap*L, window_cap*L]``.
    """
    if k_max < 1:
        raise ValueError("k_max must be at least 1")
    half = -P.y0
    out = [P]
    for k in range(2, k_max + 1):
        nxt = convolve_products(out[-1], P, prune_below, max_samples)
        if k > window_cap:
            nxt = _window(nxt, window_cap * half)
        out.append(nxt)
    return out


def product_power(P: ProductMeasure2D, k: int, prune_below: float = 0.0, **kw) -> ProductMeasure2D:
    return product_powers(P, k, prune_below, **kw)[-1]


def closed_form_ft(measure_id: str, k: int, s: float, t: float) -> complex:
    """The piecewise transforms of the ``k``-th powers as printed with the construction."""
    # centre of the side triangles and the x-location factor of the modulated atom
    if measure_id == "mu":
        centre, x_factor = 2.0, 3
    elif measure_id == "nu":
        centre, x_factor = 10.0, 2
    else:
        raise ValueError(f"unknown measure {measure_id!r}")
    if -1 < t < 1:
        return np.exp(-1j * k * s) * (1 - abs(t)) ** k
    if -centre - 1 < t < -centre + 1:
        return np.exp(1j * x_factor * k * s) * (1 - abs(t + centre)) ** k
    if centre - 1 < t < centre + 1:
        return np.exp(1j * x_factor * k * s) * (1 - abs(t - centre)) ** k
    return 0j


def numeric_ft(P: ProductMeasure2D, s: float, t: float) -> complex:
    """``sum_x exp(-i s x) * int f_x(y) exp(-i t y) dy`` (trapezoid rule)."""
    total = 0j
    for x, v in P.atoms.items():
        total += np.exp(-1j * s * float(x)) * GridDensity(P.y0, P.dy, v).transform(t)[0]
    return complex(total)


def numeric_ft_lattice(P: ProductMeasure2D, s: np.ndarray, t_index: np.ndarray, oversample: int = 4):
    """Trapezoid transform at ``t = 2*pi*m / (nfft*dy)`` for integer ``m`` via one FFT per atom.

    Returns ``(values, t)``.  Exact up to rounding on that frequency lattice.
    """
    n = P.n_samples
    nfft = sfft.next_fast_len(oversample * n)
    t = 2 * np.pi * np.asarray(t_index) / (nfft * P.dy)
    s = np.asarray(s, dtype=float)
    out = np.zeros(len(t), dtype=complex)
    for x, v in P.atoms.items():
        w = v.astype(float).copy()
        w[0] *= 0.5
        w[-1] *= 0.5
        spec = sfft.fft(w, nfft) * P.dy
        vals = spec[np.asarray(t_index) % nfft] * np.exp(-1j * t * P.y0)
        out += np.exp(-1j * s * float(x)) * vals
    return out, t


def _fmt_x(x: Fraction) -> str:
    return str(x)


def verify_counterexample(
    grid: GridSpec = GridSpec(),
    k_max: int = 6,
    tol: float = 0.02,
    ft_samples: int = 1000,
    seed: int = 20240001,
    mu_params: tuple = (-3, 2.0),
    nu_params: tuple = (-2, 10.0),
    max_samples: int = DEFAULT_MAX_SAMPLES,
    dump_csv: str | Path | None = None,
):
    """Check the half-plane construction numerically for ``k = 1..k_max``.

    (i) the parts of ``mu^k`` and ``nu^k`` on ``x > 0`` are one atom at ``x = k``
    with matching densities, (ii) every vanishing cross term has L1 mass at
    most ``tol``, (iii) the measures differ on ``x <= 0`` by total variation at
    least 0.5 and (iv) the sampled transforms match the closed forms.
    """
    from .lab import CheckReport

    if k_max < 1:
        raise ValueError("k_max must be at least 1")
    start = time.perf_counter()
    mu, nu = build_mu(grid, *mu_params), build_nu(grid, *nu_params)
    prune = tol / 10
    mu_pows = product_powers(mu, k_max, prune, max_samples=max_samples)
    nu_pows = product_powers(nu, k_max, prune, max_samples=max_samples)

    agrees, sup_diff, right_atoms, cross = {}, {}, {}, {}
    for k, (mk, nk) in enumerate(zip(mu_pows, nu_pows), start=1):
        right_mu = [x for x in mk.locations if x > 0]
        right_nu = [x for x in nk.locations if x > 0]
        right_atoms[k] = {"mu": right_mu, "nu": right_nu}
        same = right_mu == right_nu == [Fraction(k)]
        diff = float(np.max(np.abs(mk.atoms[Fraction(k)] - nk.atoms[Fraction(k)]))) if same else math.inf
        sup_diff[k] = diff
        agrees[k] = same and diff <= tol
        # anything besides the two pure atoms k and k*location is a cross term
        strays = [
            P.density(x).l1_mass()
            for P, loc in ((mk, mu_params[0]), (nk, nu_params[0]))
            for x in P.locations
            if x not in (Fraction(k), Fraction(loc) * k)
        ]
        cross[k] = max([0.0, *mk.pruned.values(), *nk.pruned.values(), *strays])

    left = {x: v for x, v in mu.atoms.items() if x <= 0}
    for x, v in nu.atoms.items():
        if x <= 0:
            left[x] = left[x] - v if x in left else -v
    tv_left = sum(trapezoid(np.abs(v), grid.dy) for v in left.values())
    mass_right = mu.density(1).mass()

    ft_err = {}
    if ft_samples:
        rng = np.random.default_rng(seed)
        s = rng.uniform(-np.pi, np.pi, ft_samples)
        t_cont = rng.uniform(-12.0, 12.0, ft_samples)
        for k, (mk, nk) in enumerate(zip(mu_pows, nu_pows), start=1):
            nfft = sfft.next_fast_len(4 * mk.n_samples)
            m_idx = np.rint(t_cont * nfft * mk.dy / (2 * np.pi)).astype(np.int64)
            worst = 0.0
            for name, P in (("mu", mk), ("nu", nk)):
                num, t = numeric_ft_lattice(P, s, m_idx)
                ref = np.array([closed_form_ft(name, k, si, ti) for si, ti in zip(s, t)])
                worst = max(worst, float(np.max(np.abs(num - ref))))
            ft_err[k] = worst

    if dump_csv is not None:
        dump_density_tables(mu_pows, nu_pows, dump_csv)

    report = CheckReport(
        "FejerCounterexample",
        hypotheses={"k_max_positive": True},
        seed=seed,
        computed={
            "L": grid.L,
            "N": grid.N,
            "tol": tol,
            "k_max": k_max,
            "restriction_agrees": agrees,
            "restriction_sup_difference": sup_diff,
            "right_atoms": right_atoms,
            "cross_term_max_l1": cross,
            "tv_difference_left": tv_left,
            "mass_right": mass_right,
            "mu_atoms": {k: [_fmt_x(x) for x in P.locations] for k, P in enumerate(mu_pows, start=1)},
            "nu_atoms": {k: [_fmt_x(x) for x in P.locations] for k, P in enumerate(nu_pows, start=1)},
            "ft_max_error": ft_err,
            "ft_samples": ft_samples,
        },
        timings={"seconds": time.perf_counter() - start},
    )
    checks = {
        "restrictions_agree": all(agrees.values()),
        "cross_terms_vanish": all(v <= tol for v in cross.values()),
        "measures_differ": tv_left >= 0.5,
        "transforms_match": all(v <= tol for v in ft_err.values()),
    }
    report.computed["checks"] = checks
    report.conclusion_holds = all(checks.values())
    if not report.conclusion_holds:
        report.witness = {"failed_checks": sorted(k for k, v in checks.items() if not v), "L": grid.L, "N": grid.N}
    return report


def dump_density_tables(mu_pows, nu_pows, directory) -> list[Path]:
    """One CSV per power: ``y`` then a column per ``x``-atom of each measure."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for k, (mk, nk) in enumerate(zip(mu_pows, nu_pows), start=1):
        path = directory / f"power_{k}.csv"
        cols = [(f"mu_density_x={x}", v) for x, v in mk.atoms.items()]
        cols += [(f"nu_density_x={x}", v) for x, v in nk.atoms.items()]
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["y"] + [name for name, _ in cols])
            for j, yj in enumerate(mk.y):
                writer.writerow([f"{yj:.9g}"] + [f"{v[j]:.9e}" for _, v in cols])
        paths.append(path)
    return paths
