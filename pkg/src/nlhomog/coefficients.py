"""Periodic coefficient fields Theta(y, eta) on the unit torus squared."""

import numpy as np

from ._validation import CoefficientError, ParameterError

KINDS = ("constant", "trig-product", "gridded-table", "function")

_PROBE = np.linspace(0.0, 1.0, 41)


class CoefficientField:
    """A 1-periodic coefficient bounded by ``1/lam < Theta < lam``.

    Parameters
    ----------
    kind : {"constant", "trig-product", "gridded-table", "function"}
    lam : float, optional
        Ellipticity bound. When omitted the tightest bound seen on the probe
        grid is used (inflated by ``1e-9`` so the strict inequality holds).
    **params
        ``value`` for constant; ``base``, ``amplitude`` and ``frequency`` for
        ``base + amplitude * sin(2 pi k y) sin(2 pi k eta)``; ``table`` (an
        ``M x M`` array sampled at ``(i/M, j/M)``, bilinear periodic
        interpolation) for gridded-table; ``func`` and ``symmetric`` for an
        arbitrary vectorised callable.
    """

    def __init__(self, kind, lam=None, **params):
        if kind not in KINDS:
            raise ParameterError(f"unknown coefficient kind {kind!r}; expected one of {KINDS}")
        self.kind = kind
        self.params = dict(params)
        if kind == "constant":
            self._value = float(params.get("value", 1.0))
        elif kind == "trig-product":
            self._base = float(params.get("base", 1.0))
            self._amp = float(params.get("amplitude", 0.9))
            self._freq = int(params.get("frequency", 1))
            if self._freq < 1:
                raise ParameterError("trig-product frequency must be a positive integer")
        elif kind == "gridded-table":
            table = np.asarray(params["table"], dtype=float)
            if table.ndim != 2 or table.shape[0] != table.shape[1] or table.shape[0] < 2:
                raise ParameterError("gridded-table needs a square M x M table, M >= 2")
            self._table = table
        else:
            if not callable(params.get("func")):
                raise ParameterError("function kind needs a callable 'func'")
            self._func = params["func"]
        self.symmetric = bool(params.get("symmetric", True)) if kind == "function" else True
        probe_y, probe_eta = np.meshgrid(_PROBE, _PROBE, indexing="ij")
        samples = self(probe_y, probe_eta)
        if not np.all(np.isfinite(samples)) or np.min(samples) <= 0:
            raise CoefficientError("coefficient must be finite and positive")
        if lam is None:
            lam = max(np.max(samples), 1.0 / np.min(samples), 1.0) * (1 + 1e-9)
            lam = max(lam, 1.0 + 1e-9)
        self.lam = float(lam)
        self.check(samples)

    def __repr__(self):
        shown = {k: v for k, v in self.params.items() if k not in ("table", "func")}
        return f"CoefficientField({self.kind!r}, lam={self.lam:.6g}, {shown})"

    def __call__(self, y, eta):
        y = np.asarray(y, dtype=float)
        eta = np.asarray(eta, dtype=float)
        if self.kind == "constant":
            return np.full(np.broadcast(y, eta).shape, self._value)
        if self.kind == "trig-product":
            w = 2.0 * np.pi * self._freq
            return self._base + self._amp * np.sin(w * y) * np.sin(w * eta)
        if self.kind == "gridded-table":
            return _bilinear_periodic(self._table, y, eta)
        return np.asarray(self._func(y, eta), dtype=float) * np.ones(np.broadcast(y, eta).shape)

    def check(self, samples=None):
        """Probe symmetry, periodicity and the lambda bounds; raise on failure."""
        if self.lam <= 1:
            raise CoefficientError("lambda must exceed 1")
        Y, E = np.meshgrid(_PROBE, _PROBE, indexing="ij")
        if samples is None:
            samples = self(Y, E)
        if np.min(samples) <= 1.0 / self.lam or np.max(samples) >= self.lam:
            raise CoefficientError(
                f"coefficient leaves (1/lambda, lambda) = ({1 / self.lam:.6g}, {self.lam:.6g}): "
                f"range [{np.min(samples):.6g}, {np.max(samples):.6g}]")
        scale = np.max(np.abs(samples))
        if np.max(np.abs(self(Y + 1.0, E) - samples)) > 1e-12 * scale or \
                np.max(np.abs(self(Y, E - 1.0) - samples)) > 1e-12 * scale:
            raise CoefficientError("coefficient is not 1-periodic in each argument")
        if self.symmetric and np.max(np.abs(samples - samples.T)) > 1e-12 * scale:
            raise CoefficientError("coefficient declared symmetric fails the symmetry probe")

    def mean(self, n=None):
        """Integral over the torus squared by the periodic trapezoidal rule.

        Exact for trig-product fields and for bilinear tables sampled on
        their own nodes.
        """
        if n is None:
            n = self._table.shape[0] if self.kind == "gridded-table" else 256
        t = np.arange(n) / n
        Y, E = np.meshgrid(t, t, indexing="ij")
        return float(np.mean(self(Y, E)))

    def average_second(self, y, n=64):
        """``integral_0^1 Theta(y, eta) d eta`` for each ``y``, symmetrised."""
        y = np.asarray(y, dtype=float)
        eta = np.arange(n) / n
        vals = self.symmetric_eval(y[..., None], eta)
        return vals.mean(axis=-1)

    def symmetric_eval(self, y, eta):
        """``Theta_s(y, eta) = (Theta(y, eta) + Theta(eta, y)) / 2``."""
        if self.symmetric:
            return self(y, eta)
        return 0.5 * (self(y, eta) + self(eta, y))

    def symmetric_part(self):
        if self.symmetric:
            return self
        return CoefficientField("function", func=self.symmetric_eval, symmetric=True, lam=self.lam)

    def scaled(self, factor):
        """``factor * Theta`` as a new field (lambda widened as needed)."""
        lam = self.lam * max(factor, 1.0 / factor)
        return CoefficientField("function", func=lambda y, e: factor * self(y, e),
                                symmetric=self.symmetric, lam=lam)

    def to_config(self):
        out = {"kind": self.kind, "lambda": self.lam}
        if self.kind == "constant":
            out["value"] = self._value
        elif self.kind == "trig-product":
            out.update(base=self._base, amplitude=self._amp, frequency=self._freq)
        return out


def constant(value, lam=None):
    return CoefficientField("constant", value=value, lam=lam)


def trig_product(base=1.0, amplitude=0.9, frequency=1, lam=None):
    return CoefficientField("trig-product", base=base, amplitude=amplitude,
                            frequency=frequency, lam=lam)


def benchmark_field():
    """``1 + 0.9 sin(2 pi y) sin(2 pi eta)``, the rate-study coefficient."""
    return trig_product(1.0, 0.9, 1)


def _bilinear_periodic(table, y, eta):
    m = table.shape[0]
    ty = np.mod(y, 1.0) * m
    te = np.mod(eta, 1.0) * m
    i = np.floor(ty).astype(int)
    j = np.floor(te).astype(int)
    fy = ty - i
    fe = te - j
    i %= m
    j %= m
    i1 = (i + 1) % m
    j1 = (j + 1) % m
    return ((1 - fy) * (1 - fe) * table[i, j] + fy * (1 - fe) * table[i1, j]
            + (1 - fy) * fe * table[i, j1] + fy * fe * table[i1, j1])
