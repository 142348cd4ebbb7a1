"""Monte Carlo exit times of the symmetric alpha-stable process with Levy density |z|^{-1-alpha}."""

import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from math import gamma, sqrt

import numpy as np
from scipy.integrate import quad
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import ParameterError, check_alpha, check_positive

BLOCK_PATHS = 8192
STEPS_PER_DRAW = 64


@lru_cache(maxsize=None)
def stable_scale_constant(alpha):
    """``c_alpha = 2 int_0^inf (1 - cos s) s^{-1-alpha} ds``.

    The process whose generator integrates against ``|z|^{-1-alpha}`` has
    characteristic exponent ``c_alpha |xi|^alpha``. The oscillatory tail
    beyond ``s = 1`` goes to QUADPACK's Fourier-integral routine.
    """
    alpha = check_alpha(alpha)
    head, _ = quad(lambda s: 2.0 * np.sin(s / 2.0) ** 2 * s ** (-1.0 - alpha), 0.0, 1.0,
                   epsabs=1e-15, epsrel=1e-13, limit=200)
    osc, _ = quad(lambda s: s ** (-1.0 - alpha), 1.0, np.inf, weight="cos", wvar=1.0, limlst=100)
    return 2.0 * (head + 1.0 / alpha - osc)


def sample_stable_increment(alpha, dt, rng, size=None, angle=None, expo=None):
    """Increments over ``dt`` with characteristic function ``exp(-dt c_alpha |xi|^alpha)``.

    Chambers-Mallows-Stuck for the symmetric case; ``angle`` and ``expo``
    override the uniform angle on ``(-pi/2, pi/2)`` and the unit exponential.
    """
    alpha = check_alpha(alpha)
    dt = check_positive(dt, "dt")
    U = rng.uniform(-np.pi / 2, np.pi / 2, size) if angle is None else np.asarray(angle, float)
    scale = (dt * stable_scale_constant(alpha)) ** (1.0 / alpha)
    if alpha == 1.0:
        return scale * np.tan(U)
    W = rng.standard_exponential(np.shape(U)) if expo is None else np.asarray(expo, float)
    X = (np.sin(alpha * U) / np.cos(U) ** (1.0 / alpha)
         * (np.cos((1.0 - alpha) * U) / W) ** ((1.0 - alpha) / alpha))
    return scale * X


@dataclass(frozen=True)
class ExitTimeEstimate:
    mean: float
    stderr: float
    n_paths: int
    dt: float
    x0: float
    alpha: float
    seed: int
    domain: tuple = (-1.0, 1.0)


def _block_rng(seed, block):
    return np.random.Generator(np.random.Philox(key=np.array([seed, block], dtype=np.uint64)))


def _block_exit_steps(alpha, dt, a, b, x0, n, rng):
    """Number of steps until each of ``n`` walkers started at ``x0`` leaves (a, b)."""
    steps = np.zeros(n, dtype=np.int64)
    alive = np.arange(n)
    x = np.full(n, float(x0))
    taken = 0
    while alive.size:
        path = x[:, None] + np.cumsum(
            sample_stable_increment(alpha, dt, rng, (alive.size, STEPS_PER_DRAW)), axis=1)
        out = (path <= a) | (path >= b)
        hit = out.any(axis=1)
        steps[alive[hit]] = taken + np.argmax(out[hit], axis=1) + 1
        alive = alive[~hit]
        x = path[~hit, -1]
        taken += STEPS_PER_DRAW
    return steps


def mc_exit_time(alpha, x0, dt=1e-4, n_paths=100_000, seed=0, domain=(-1.0, 1.0), threads=1):
    """Euler jump-walk estimate of the mean first exit time from ``domain``.

    Paths are split into fixed blocks of ``BLOCK_PATHS``, each drawing from its
    own Philox stream keyed by ``(seed, block)``, so the result is bit-identical
    for any ``threads``.
    """
    alpha = check_alpha(alpha)
    dt = check_positive(dt, "dt")
    n_paths = check_positive(n_paths, "n_paths", integer=True)
    threads = check_positive(threads, "threads", integer=True)
    if int(seed) < 0:
        raise ParameterError("seed must be nonnegative")
    a, b = map(float, domain)
    if not a < b:
        raise ParameterError("domain must satisfy left < right")
    if not a < x0 < b:
        return ExitTimeEstimate(0.0, 0.0, n_paths, dt, float(x0), alpha, int(seed), (a, b))
    sizes = [min(BLOCK_PATHS, n_paths - s) for s in range(0, n_paths, BLOCK_PATHS)]

    def run(k):
        return _block_exit_steps(alpha, dt, a, b, x0, sizes[k], _block_rng(int(seed), k))

    if threads == 1:
        blocks = [run(k) for k in range(len(sizes))]
    else:
        with ThreadPoolExecutor(threads) as pool:
            blocks = list(pool.map(run, range(len(sizes))))
    times = np.concatenate(blocks) * dt
    stderr = float(times.std(ddof=1) / sqrt(n_paths)) if n_paths > 1 else 0.0
    return ExitTimeEstimate(float(times.mean()), stderr, n_paths, dt, float(x0), alpha, int(seed), (a, b))


def torsion_reference(alpha, r=1.0, x=0.0):
    """``C(1, alpha) (r^2 - x^2)^{alpha/2}``: mean exit time from (-r, r) for the
    process with symbol ``|xi|^alpha``."""
    alpha = check_alpha(alpha)
    r = check_positive(r, "r")
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > r):
        raise ParameterError("torsion reference is defined only for |x| <= r")
    c = gamma(0.5) / (2.0 ** alpha * gamma(1.0 + alpha / 2.0) * gamma((1.0 + alpha) / 2.0))
    val = c * np.maximum(r * r - x * x, 0.0) ** (alpha / 2.0)
    return float(val) if val.ndim == 0 else val


def residence_time_reference(alpha, r=1.0, x=0.0):
    """Mean exit time for the unnormalized kernel ``|z|^{-1-alpha}``: torsion divided by ``c_alpha``."""
    return torsion_reference(alpha, r, x) / stable_scale_constant(alpha)


def to_csv(estimates):
    buf = io.StringIO()
    buf.write("alpha,x0,dt,n_paths,mean,stderr,reference,torsion_reference\n")
    for e in estimates:
        r = e.domain[1] - (e.domain[0] + e.domain[1]) / 2
        xc = e.x0 - (e.domain[0] + e.domain[1]) / 2
        inside = abs(xc) <= r
        ref = residence_time_reference(e.alpha, r, xc) if inside else 0.0
        tor = torsion_reference(e.alpha, r, xc) if inside else 0.0
        buf.write(f"{e.alpha:.17g},{e.x0:.17g},{e.dt:.17g},{e.n_paths},{e.mean:.17g},"
                  f"{e.stderr:.17g},{ref:.17g},{tor:.17g}\n")
    return buf.getvalue()


class StableExitTime(BaseEstimator):
    """``fit(x0s)`` estimates the mean exit time from each start point."""

    def __init__(self, alpha=1.0, dt=1e-4, n_paths=100_000, seed=0, domain=(-1.0, 1.0), threads=1):
        self.alpha = alpha
        self.dt = dt
        self.n_paths = n_paths
        self.seed = seed
        self.domain = domain
        self.threads = threads

    def fit(self, x0s, y=None):
        self.estimates_ = [mc_exit_time(self.alpha, float(x), self.dt, self.n_paths, self.seed,
                                        self.domain, self.threads) for x in np.atleast_1d(x0s)]
        return self

    def predict(self, x0s=None):
        check_is_fitted(self, "estimates_")
        return np.array([e.mean for e in self.estimates_])
