"""Run configuration: flat ``key = value`` text with dotted keys.

Example::

    # cooling run, T = 250 mK
    coupling_mode = explicit
    bath_temperature = 0.25
    cavity.length = 6.4e-3
    cavity.cap_per_len = 130e-12
    cavity.z0 = 60.1
    resistor1.resistance = 230
    resistor1.coupling_override = 1.53e9
    ...
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .errors import ConfigError
from .model import CavityParams, ResistorParams, SystemParams

COUPLING_MODES = ("explicit", "geometric")
MODELS = ("quantum", "two_level", "semiclassical", "all")
T2_RULES = ("self_consistent", "offset")

_FLOAT, _INT, _STR = float, int, str

_SCHEMA = {
    "cavity.length": _FLOAT,
    "cavity.cap_per_len": _FLOAT,
    "cavity.ind_per_len": _FLOAT,
    "cavity.z0": _FLOAT,
    "cavity.loss_per_len": _FLOAT,
    "bath_temperature": _FLOAT,
    "n_modes": _INT,
    "n_photons_max": _INT,
    "coupling_mode": _STR,
    "model": _STR,
    "t1": _FLOAT,
    "t2_rule": _STR,
    "t2_offset": _FLOAT,
    "sweep.variable": _STR,
    "sweep.start": _FLOAT,
    "sweep.stop": _FLOAT,
    "sweep.points": _INT,
    "output_path": _STR,
    "numeric.n_nodes": _INT,
    "numeric.quadrature_tol": _FLOAT,
    "numeric.fixed_point_tol": _FLOAT,
    "numeric.max_iterations": _INT,
}
for _r in ("resistor1", "resistor2"):
    for _f in ("resistance", "position_fraction", "volume", "sigma_ep", "coupling_override"):
        _SCHEMA[f"{_r}.{_f}"] = _FLOAT


@dataclass(frozen=True)
class Sweep:
    variable: str
    start: float
    stop: float
    points: int

    def grid(self):
        """Uniform grid including both endpoints."""
        n = self.points
        step = (self.stop - self.start) / (n - 1)
        return [self.stop if k == n - 1 else self.start + k * step for k in range(n)]


@dataclass(frozen=True)
class NumericOptions:
    n_nodes: int = 100
    quadrature_tol: float = 1e-6
    fixed_point_tol: float = 1e-9
    max_iterations: int = 1000


@dataclass(frozen=True)
class RunConfig:
    system: SystemParams
    coupling_mode: str = "explicit"
    model: str = "all"
    t1: Optional[float] = None
    sweep: Optional[Sweep] = None
    t2_rule: str = "self_consistent"
    t2_offset: float = 0.0
    output_path: str = ""
    numeric: NumericOptions = field(default_factory=NumericOptions)

    def wants(self, model):
        return self.model in ("all", model)

    def t2_for(self, t1):
        return t1 - self.t2_offset


def _parse_lines(text):
    values, lines = {}, {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _SCHEMA:
            raise ConfigError(f"unknown key {key!r}", lineno)
        if key in values:
            raise ConfigError(f"duplicate key {key!r}", lineno)
        if not value:
            raise ConfigError(f"empty value for {key!r}", lineno)
        kind = _SCHEMA[key]
        try:
            if kind is _INT:
                values[key] = int(value)
            elif kind is _FLOAT:
                values[key] = float(value)
            else:
                values[key] = value
        except ValueError:
            raise ConfigError(f"{key}: cannot read {value!r} as {kind.__name__}", lineno) from None
        lines[key] = lineno
    return values, lines


def _require(values, key):
    if key not in values:
        raise ConfigError(f"missing required key {key!r}")
    return values[key]


def _build(values, lines):
    def fail(key, exc):
        raise ConfigError(f"{key}: {exc}", lines.get(key)) from None

    mode = values.get("coupling_mode", "explicit")
    if mode not in COUPLING_MODES:
        fail("coupling_mode", f"must be one of {COUPLING_MODES}, got {mode!r}")

    if "cavity.ind_per_len" in values and "cavity.z0" in values:
        fail("cavity.z0", "give either cavity.ind_per_len or cavity.z0, not both")
    try:
        length = _require(values, "cavity.length")
        cap = _require(values, "cavity.cap_per_len")
        loss = values.get("cavity.loss_per_len", 0.0)
        if "cavity.z0" in values:
            cavity = CavityParams.from_impedance(length, cap, values["cavity.z0"], loss)
        else:
            cavity = CavityParams(length, cap, _require(values, "cavity.ind_per_len"), loss)
    except ValueError as exc:
        raise ConfigError(f"invalid cavity: {exc}") from None

    resistors = []
    for name in ("resistor1", "resistor2"):
        override = values.get(f"{name}.coupling_override")
        if mode == "explicit" and override is None:
            raise ConfigError(f"coupling_mode = explicit requires {name}.coupling_override")
        if mode == "geometric" and override is not None:
            fail(f"{name}.coupling_override", "not allowed with coupling_mode = geometric")
        try:
            resistors.append(ResistorParams(
                resistance=_require(values, f"{name}.resistance"),
                position_fraction=_require(values, f"{name}.position_fraction"),
                volume=_require(values, f"{name}.volume"),
                sigma_ep=_require(values, f"{name}.sigma_ep"),
                coupling_override=override,
            ))
        except ValueError as exc:
            raise ConfigError(f"{name}: {exc}") from None

    try:
        system = SystemParams(
            cavity,
            resistors[0],
            resistors[1],
            bath_temperature=_require(values, "bath_temperature"),
            n_modes=values.get("n_modes", 30),
            n_photons_max=values.get("n_photons_max", 50),
        )
    except ValueError as exc:
        key = next((k for k in ("bath_temperature", "n_modes", "n_photons_max") if k in str(exc)), None)
        raise ConfigError(str(exc), lines.get(key)) from None

    model = values.get("model", "all")
    if model not in MODELS:
        fail("model", f"must be one of {MODELS}, got {model!r}")
    rule = values.get("t2_rule", "self_consistent")
    if rule not in T2_RULES:
        fail("t2_rule", f"must be one of {T2_RULES}, got {rule!r}")
    offset = values.get("t2_offset", 0.0)
    if rule == "offset" and "t2_offset" not in values:
        raise ConfigError("t2_rule = offset requires t2_offset")
    if not offset >= 0:
        fail("t2_offset", f"must be >= 0, got {offset!r}")

    t1 = values.get("t1")
    if t1 is not None and not t1 > 0:
        fail("t1", f"must be > 0, got {t1!r}")

    sweep = None
    sweep_keys = [k for k in values if k.startswith("sweep.")]
    if sweep_keys:
        variable = values.get("sweep.variable", "t1")
        if variable != "t1":
            fail("sweep.variable", f"only 't1' can be swept, got {variable!r}")
        start = _require(values, "sweep.start")
        stop = _require(values, "sweep.stop")
        points = _require(values, "sweep.points")
        if not start < stop:
            fail("sweep.stop", f"sweep.start must be < sweep.stop ({start!r} >= {stop!r})")
        if not start > 0:
            fail("sweep.start", f"must be > 0, got {start!r}")
        if points < 2:
            fail("sweep.points", f"must be >= 2, got {points!r}")
        sweep = Sweep(variable, start, stop, points)

    if rule == "offset":
        lowest = [t for t in (t1, sweep.start if sweep else None) if t is not None]
        for t in lowest:
            if not t - offset > 0:
                fail("t2_offset", f"t1 - t2_offset must stay > 0 (t1={t!r}, offset={offset!r})")

    try:
        numeric = NumericOptions(
            n_nodes=values.get("numeric.n_nodes", 100),
            quadrature_tol=values.get("numeric.quadrature_tol", 1e-6),
            fixed_point_tol=values.get("numeric.fixed_point_tol", 1e-9),
            max_iterations=values.get("numeric.max_iterations", 1000),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if numeric.n_nodes < 10:
        fail("numeric.n_nodes", f"must be >= 10, got {numeric.n_nodes!r}")
    for key in ("quadrature_tol", "fixed_point_tol"):
        if not getattr(numeric, key) > 0:
            fail(f"numeric.{key}", "must be > 0")
    if numeric.max_iterations < 1:
        fail("numeric.max_iterations", "must be >= 1")

    return RunConfig(
        system=system,
        coupling_mode=mode,
        model=model,
        t1=t1,
        sweep=sweep,
        t2_rule=rule,
        t2_offset=offset,
        output_path=values.get("output_path", ""),
        numeric=numeric,
    )


def parse_config(text: str) -> RunConfig:
    values, lines = _parse_lines(text)
    return _build(values, lines)


def load_config(path) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text)


def serialize_config(cfg: RunConfig) -> str:
    """Inverse of :func:`parse_config`; floats are written with ``repr`` so they round-trip."""
    s = cfg.system
    out = [
        f"coupling_mode = {cfg.coupling_mode}",
        f"model = {cfg.model}",
        f"bath_temperature = {s.bath_temperature!r}",
        f"n_modes = {s.n_modes}",
        f"n_photons_max = {s.n_photons_max}",
        f"cavity.length = {s.cavity.length!r}",
        f"cavity.cap_per_len = {s.cavity.cap_per_len!r}",
        f"cavity.ind_per_len = {s.cavity.ind_per_len!r}",
        f"cavity.loss_per_len = {s.cavity.loss_per_len!r}",
    ]
    for name, r in (("resistor1", s.resistor1), ("resistor2", s.resistor2)):
        out += [
            f"{name}.resistance = {r.resistance!r}",
            f"{name}.position_fraction = {r.position_fraction!r}",
            f"{name}.volume = {r.volume!r}",
            f"{name}.sigma_ep = {r.sigma_ep!r}",
        ]
        if r.coupling_override is not None:
            out.append(f"{name}.coupling_override = {r.coupling_override!r}")
    if cfg.t1 is not None:
        out.append(f"t1 = {cfg.t1!r}")
    out.append(f"t2_rule = {cfg.t2_rule}")
    if cfg.t2_rule == "offset" or cfg.t2_offset:
        out.append(f"t2_offset = {cfg.t2_offset!r}")
    if cfg.sweep is not None:
        out += [
            f"sweep.variable = {cfg.sweep.variable}",
            f"sweep.start = {cfg.sweep.start!r}",
            f"sweep.stop = {cfg.sweep.stop!r}",
            f"sweep.points = {cfg.sweep.points}",
        ]
    if cfg.output_path:
        out.append(f"output_path = {cfg.output_path}")
    n = cfg.numeric
    out += [
        f"numeric.n_nodes = {n.n_nodes}",
        f"numeric.quadrature_tol = {n.quadrature_tol!r}",
        f"numeric.fixed_point_tol = {n.fixed_point_tol!r}",
        f"numeric.max_iterations = {n.max_iterations}",
    ]
    return "\n".join(out) + "\n"
