"""Flat ``key = value`` run configuration with dotted key prefixes.

Example::

    experiment = sweep
    alpha = 0.5
    theta.kind = trig-product
    theta.amplitude = 0.9
    sweep.eps_list = 0.125, 0.0625, 0.03125, 0.015625

Blank lines and ``#`` comments are ignored. Unknown keys are errors.
"""

from dataclasses import dataclass, field

import numpy as np

from ._validation import ParameterError
from .coefficients import KINDS, CoefficientField
from .grid import QuadratureSpec

EXPERIMENTS = ("cell", "solve", "effective", "sweep", "mc", "validate")


class ConfigError(ParameterError):
    """Parse or validation failure; ``field`` names the offending key, ``line`` its line."""

    def __init__(self, message, field=None, line=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field '{field}'")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)
        self.field = field
        self.line = line


def _float(s):
    return float(s)


def _int(s):
    v = float(s)
    if v != int(v):
        raise ValueError("expected an integer")
    return int(v)


def _bool(s):
    low = s.strip().lower()
    if low in ("true", "yes", "1", "on"):
        return True
    if low in ("false", "no", "0", "off"):
        return False
    raise ValueError("expected true or false")


def _floats(s):
    return tuple(float(t) for t in s.replace(";", ",").split(",") if t.strip())


def _ints(s):
    return tuple(_int(t) for t in s.replace(";", ",").split(",") if t.strip())


def _str(s):
    return s.strip()


# key -> (parser, default)
SCHEMA = {
    "experiment": (_str, None),
    "alpha": (_float, 0.5),
    "seed": (_int, 0),
    "domain.left": (_float, -1.0),
    "domain.right": (_float, 1.0),
    "theta.kind": (_str, "trig-product"),
    "theta.lambda": (_float, None),
    "theta.value": (_float, 1.0),
    "theta.base": (_float, 1.0),
    "theta.amplitude": (_float, 0.9),
    "theta.frequency": (_int, 1),
    "theta.table": (_str, None),
    "eps": (_float, 0.125),
    "grid.h": (_float, None),
    "grid.h_factor": (_int, 8),
    "grid.margin": (_float, None),
    "grid.R": (_float, None),
    "cell.N": (_int, 256),
    "cell.kernel": (_str, "minimal-image"),
    "quad.gauss_order": (_int, 8),
    "quad.duffy_refinement": (_int, 1),
    "quad.far_field_threshold": (_int, 4),
    "quad.far_order": (_int, 6),
    "source.value": (_float, 1.0),
    "exterior.value": (_float, 0.0),
    "effective.a2_sign": (_str, "+1"),
    "sweep.eps_list": (_floats, (1 / 8, 1 / 16, 1 / 32, 1 / 64)),
    "sweep.a2_sign": (_str, "both"),
    "sweep.control": (_bool, True),
    "sweep.force": (_bool, False),
    "mc.x0": (_floats, (0.0,)),
    "mc.dt": (_float, 1e-4),
    "mc.n_paths": (_int, 100_000),
    "validate.criteria": (_ints, (1, 2, 3, 4, 5, 6)),
}


@dataclass
class RunConfig:
    """Validated configuration; ``values`` holds every schema key with defaults filled."""

    experiment: str
    values: dict
    explicit: set = field(default_factory=set)

    def __getitem__(self, key):
        return self.values[key]

    @property
    def alpha(self):
        return self.values["alpha"]

    @property
    def domain(self):
        return (self.values["domain.left"], self.values["domain.right"])

    def quad(self):
        return QuadratureSpec(self["quad.gauss_order"], self["quad.duffy_refinement"],
                              self["quad.far_field_threshold"], self["quad.far_order"])

    def theta(self):
        kind = self["theta.kind"]
        lam = self["theta.lambda"]
        try:
            if kind == "constant":
                return CoefficientField("constant", lam=lam, value=self["theta.value"])
            if kind == "trig-product":
                return CoefficientField("trig-product", lam=lam, base=self["theta.base"],
                                        amplitude=self["theta.amplitude"], frequency=self["theta.frequency"])
            if kind == "gridded-table":
                table = np.loadtxt(self["theta.table"], delimiter=",", ndmin=2)
                return CoefficientField("gridded-table", lam=lam, table=table)
        except (OSError, ValueError) as exc:
            raise ConfigError(str(exc), field="theta") from exc
        raise ConfigError(f"kind {kind!r} cannot be built from a config file", field="theta.kind")

    def h(self):
        """Explicit ``grid.h`` or ``eps / grid.h_factor``."""
        return self["grid.h"] if self["grid.h"] is not None else self["eps"] / self["grid.h_factor"]

    def to_text(self):
        lines = [f"experiment = {self.experiment}"]
        for k in sorted(self.values):
            v = self.values[k]
            if k == "experiment" or v is None:
                continue
            if isinstance(v, tuple):
                v = ", ".join(repr(t) if isinstance(t, float) else str(t) for t in v)
            lines.append(f"{k} = {v}")
        return "\n".join(lines) + "\n"


def parse_config(text, experiment=None, overrides=None):
    """Parse ``text`` into a validated :class:`RunConfig`.

    ``experiment`` (from the command line) must agree with an ``experiment`` key
    when both are present. ``overrides`` maps keys to already-typed values.
    """
    raw, lines = {}, {}
    for n, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"expected 'key = value', got {body!r}", line=n)
        key, value = (s.strip() for s in body.split("=", 1))
        if key not in SCHEMA:
            raise ConfigError("unknown key", field=key, line=n)
        if key in raw:
            raise ConfigError("duplicate key", field=key, line=n)
        parser = SCHEMA[key][0]
        try:
            raw[key] = parser(value)
        except ValueError as exc:
            raise ConfigError(f"cannot parse {value!r}: {exc}", field=key, line=n) from exc
        lines[key] = n
    for key, value in (overrides or {}).items():
        if key not in SCHEMA:
            raise ConfigError("unknown key", field=key)
        raw[key] = value
    exp = raw.get("experiment")
    if experiment is not None:
        if exp is not None and exp != experiment:
            raise ConfigError(f"config is for {exp!r} but the command is {experiment!r}",
                              field="experiment", line=lines.get("experiment"))
        exp = experiment
    if exp not in EXPERIMENTS:
        raise ConfigError(f"experiment must be one of {EXPERIMENTS}", field="experiment",
                          line=lines.get("experiment"))
    values = {k: d for k, (_, d) in SCHEMA.items()}
    values.update(raw)
    values["experiment"] = exp
    cfg = RunConfig(exp, values, set(raw))
    _validate(cfg, lines)
    return cfg


def _validate(cfg, lines):
    def fail(key, msg):
        raise ConfigError(msg, field=key, line=lines.get(key))

    v = cfg.values
    if not 0 < v["alpha"] < 2:
        fail("alpha", f"alpha must lie in (0, 2), got {v['alpha']}")
    if not v["domain.left"] < v["domain.right"]:
        fail("domain.right", "domain.right must exceed domain.left")
    if v["theta.kind"] not in KINDS or v["theta.kind"] == "function":
        fail("theta.kind", f"theta.kind must be one of {KINDS[:3]}")
    if v["theta.kind"] == "gridded-table" and not v["theta.table"]:
        fail("theta.table", "gridded-table needs a CSV path in theta.table")
    if v["theta.lambda"] is not None and v["theta.lambda"] <= 1:
        fail("theta.lambda", "lambda must exceed 1")
    if v["eps"] <= 0:
        fail("eps", "eps must be positive")
    for key in ("grid.h", "grid.margin", "grid.R", "mc.dt"):
        if v[key] is not None and v[key] <= 0:
            fail(key, f"{key} must be positive")
    for key in ("grid.h_factor", "mc.n_paths", "quad.gauss_order", "quad.duffy_refinement",
                "quad.far_field_threshold", "quad.far_order"):
        if v[key] < 1:
            fail(key, f"{key} must be a positive integer")
    for key in ("quad.gauss_order", "quad.far_order"):
        if v[key] < 2:
            fail(key, f"{key} must be at least 2")
    if v["cell.N"] < 8 or v["cell.N"] % 2:
        fail("cell.N", "cell.N must be an even integer >= 8")
    if v["cell.kernel"] not in ("minimal-image", "restricted"):
        fail("cell.kernel", "cell.kernel must be minimal-image or restricted")
    if v["effective.a2_sign"] not in ("+1", "-1"):
        fail("effective.a2_sign", "effective.a2_sign must be +1 or -1")
    if v["sweep.a2_sign"] not in ("+1", "-1", "both"):
        fail("sweep.a2_sign", "sweep.a2_sign must be +1, -1 or both")
    if v["seed"] < 0:
        fail("seed", "seed must be nonnegative")
    if cfg.experiment == "sweep":
        eps_list = v["sweep.eps_list"]
        if len(eps_list) < 3:
            fail("sweep.eps_list", "a rate fit needs at least three eps values")
        for e in eps_list:
            if e <= 0 or abs(1 / e - round(1 / e)) > 1e-9:
                fail("sweep.eps_list", f"every eps must be 1/k for an integer k, got {e}")
        if not v["sweep.force"]:
            fixed = v["grid.h"]
            bad = [e for e in eps_list if (fixed if fixed is not None else e / v["grid.h_factor"]) > e / 8 * (1 + 1e-9)]
            if bad:
                key = "grid.h" if fixed is not None else "grid.h_factor"
                fail(key, f"resolution rule h <= eps/8 violated for eps = {bad[0]:g}; "
                          "set sweep.force = true to override")
    if cfg.experiment == "validate":
        bad = [n for n in v["validate.criteria"] if n not in range(1, 7)]
        if bad:
            fail("validate.criteria", f"criteria are numbered 1..6, got {bad}")
