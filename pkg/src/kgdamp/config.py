"""Flat ``key = value`` run configuration.

Example::

    # Figure-1-left style run
    preset = fig1_left
    n = 64
    dt = 0.005
    t_final = 50

Explicit initial data instead of a preset uses mode lists: whitespace- or
``;``-separated entries ``k1[,k2]:re[,im]`` giving Fourier coefficients, e.g.
``psi0 = 0:1 1:1.5 -1:1.5`` is ``1 + 3 cos x``.
"""
from dataclasses import dataclass, field, fields, replace

from .diagnostics import Q_POSITIONS
from .integrators import SimParams

PRESET_DIMS = {"fig1_left": 1, "fig1_right": 1, "fig2_left": 2, "fig2_right": 2}
SWEEPABLE = ("dt", "n", "p", "amplitude")


class ConfigError(ValueError):
    def __init__(self, message, line=None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class SimConfig:
    dim: int = 1
    n: int = 64
    dt: float = 0.005
    t_final: float = 50.0
    p: float = 2.0
    damped: bool = True
    dealias: bool = False
    nonlinear: bool = True
    eps: float = 0.1
    observe_stride: int = 20
    preset: str = None
    psi0: tuple = field(default=())
    v0: tuple = field(default=())
    amplitude: float = 1.0
    q_position: str = "midpoint"
    fit_start: float = 5.0
    fit_floor: float = 1e-12
    output_dir: str = "out"
    emit_plots: bool = True

    def params(self):
        return SimParams(
            p=self.p, dt=self.dt, damped=self.damped, dealias=self.dealias,
            t_final=self.t_final, nonlinear=self.nonlinear,
        )

    def with_value(self, key, value):
        return validate(replace(self, **{key: value}))


def _parse_bool(text):
    low = text.strip().lower()
    if low in ("true", "yes", "on", "1"):
        return True
    if low in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _parse_int(text):
    return int(text.strip())


def _parse_float(text):
    return float(text.strip())


def _parse_str(text):
    return text.strip()


def _parse_optional_str(text):
    text = text.strip()
    return None if text.lower() in ("", "none") else text


def parse_modes(text):
    """``"0:1 1:1.5 -1:1.5"`` -> ``(((0,), 1+0j), ((1,), 1.5+0j), ((-1,), 1.5+0j))``."""
    out = []
    for entry in text.replace(";", " ").split():
        try:
            kpart, apart = entry.split(":")
            kvec = tuple(int(v) for v in kpart.split(","))
            amp = [float(v) for v in apart.split(",")]
        except ValueError:
            raise ValueError(f"malformed mode entry {entry!r}; expected k1[,k2]:re[,im]") from None
        if len(amp) not in (1, 2):
            raise ValueError(f"malformed amplitude in {entry!r}")
        out.append((kvec, complex(amp[0], amp[1] if len(amp) == 2 else 0.0)))
    return tuple(out)


def render_modes(modes):
    return " ".join(
        ",".join(str(k) for k in kvec) + f":{amp.real!r},{amp.imag!r}" for kvec, amp in modes
    )


_PARSERS = {
    "dim": _parse_int,
    "n": _parse_int,
    "dt": _parse_float,
    "t_final": _parse_float,
    "p": _parse_float,
    "damped": _parse_bool,
    "dealias": _parse_bool,
    "nonlinear": _parse_bool,
    "eps": _parse_float,
    "observe_stride": _parse_int,
    "preset": _parse_optional_str,
    "psi0": parse_modes,
    "v0": parse_modes,
    "amplitude": _parse_float,
    "q_position": _parse_str,
    "fit_start": _parse_float,
    "fit_floor": _parse_float,
    "output_dir": _parse_str,
    "emit_plots": _parse_bool,
}


def parse_value(key, text):
    if key not in _PARSERS:
        raise ConfigError(f"unknown key {key!r}")
    return _PARSERS[key](text)


def _check(cfg):
    """Yield ``(key, message)`` for every violated invariant."""
    if cfg.dim not in (1, 2):
        yield "dim", f"dim must be 1 or 2, got {cfg.dim}"
    if cfg.n < 8 or cfg.n & (cfg.n - 1):
        yield "n", f"n must be a power of two >= 8, got {cfg.n}"
    if not cfg.dt > 0:
        yield "dt", f"dt must be positive, got {cfg.dt}"
    if not cfg.p >= 0:
        yield "p", f"p must satisfy p >= 0, got {cfg.p}"
    if cfg.dt > 0 and not cfg.t_final >= cfg.dt:
        yield "t_final", f"t_final must be >= dt, got {cfg.t_final}"
    if not 0 < cfg.eps < 1:
        yield "eps", f"eps must lie in (0, 1), got {cfg.eps}"
    if cfg.observe_stride < 1:
        yield "observe_stride", "observe_stride must be >= 1"
    if cfg.q_position not in Q_POSITIONS:
        yield "q_position", f"q_position must be one of {Q_POSITIONS}"
    if not cfg.fit_floor >= 0:
        yield "fit_floor", "fit_floor must be non-negative"
    if cfg.preset is not None:
        if cfg.preset not in PRESET_DIMS:
            yield "preset", f"unknown preset {cfg.preset!r}; choose from {sorted(PRESET_DIMS)}"
        elif PRESET_DIMS[cfg.preset] != cfg.dim:
            yield "dim", f"preset {cfg.preset} is {PRESET_DIMS[cfg.preset]}-dimensional, dim={cfg.dim}"
        if cfg.psi0 or cfg.v0:
            yield "preset", "give either a preset or explicit psi0/v0 modes, not both"
    for key in ("psi0", "v0"):
        for kvec, _ in getattr(cfg, key):
            if len(kvec) != cfg.dim:
                yield key, f"wavevector {kvec} does not match dim={cfg.dim}"
            elif any(abs(k) >= cfg.n // 2 for k in kvec):
                yield key, f"wavevector {kvec} not resolvable on n={cfg.n} (need |k_i| < n/2)"


def validate(cfg, lines=None):
    for key, msg in _check(cfg):
        raise ConfigError(msg, (lines or {}).get(key))
    return cfg


def parse_config(text, base=None):
    """Parse config text into a validated ``SimConfig``; errors carry line numbers."""
    values, lines = {}, {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _PARSERS:
            raise ConfigError(f"unknown key {key!r}", lineno)
        if key in values:
            raise ConfigError(f"duplicate key {key!r}", lineno)
        try:
            values[key] = _PARSERS[key](value)
        except ValueError as exc:
            raise ConfigError(f"bad value for {key}: {exc}", lineno) from None
        lines[key] = lineno
    if values.get("preset") and "dim" not in values and values["preset"] in PRESET_DIMS:
        values["dim"] = PRESET_DIMS[values["preset"]]
    cfg = replace(base or SimConfig(), **values)
    return validate(cfg, lines)


def render_config(cfg):
    out = []
    for f in fields(cfg):
        val = getattr(cfg, f.name)
        if f.name in ("psi0", "v0"):
            text = render_modes(val)
        elif isinstance(val, bool):
            text = "true" if val else "false"
        elif val is None:
            text = "none"
        elif isinstance(val, float):
            text = repr(val)
        else:
            text = str(val)
        out.append(f"{f.name} = {text}")
    return "\n".join(out) + "\n"
