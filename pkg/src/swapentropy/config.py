"""Run configuration from ``key = value`` files and command-line overrides."""

from pathlib import Path

from .experiments import RunConfig
from .qed import CouplingParams
from .swap import BellCoefficients

DEFAULTS = {
    "g1": "1",
    "g2": "1",
    "delta_over_g": "0",
    "alpha1": "0.7071067811865476",
    "beta1": "0.7071067811865476",
    "alpha2": "0.7071067811865476",
    "beta2": "0.7071067811865476",
    "t_start": "0",
    "t_end": "50",
    "t_step": "0.01",
    "out": None,
}
COMPLEX_KEYS = ("alpha1", "beta1", "alpha2", "beta2")


class ConfigError(ValueError):
    pass


def parse_real(key, text) -> float:
    try:
        return float(text)
    except (TypeError, ValueError):
        raise ConfigError(f"{key}: malformed number {text!r}") from None


def parse_complex(key, text) -> complex:
    """``re`` or ``re,im``."""
    parts = [p.strip() for p in str(text).split(",")]
    if len(parts) > 2:
        raise ConfigError(f"{key}: expected 're' or 're,im', got {text!r}")
    re = parse_real(key, parts[0])
    im = parse_real(key, parts[1]) if len(parts) == 2 else 0.0
    return complex(re, im)


def read_config_file(path) -> dict:
    values = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in DEFAULTS:
            raise ConfigError(f"{key}: unknown key ({path}:{lineno})")
        values[key] = value
    return values


def parse_config(path=None, overrides=None) -> RunConfig:
    """Defaults, then file values, then non-None ``overrides``."""
    values = dict(DEFAULTS)
    if path is not None:
        values.update(read_config_file(path))
    for key, value in (overrides or {}).items():
        if key not in DEFAULTS:
            raise ConfigError(f"{key}: unknown key")
        if value is not None:
            values[key] = value

    reals = {k: parse_real(k, values[k])
             for k in ("g1", "g2", "delta_over_g", "t_start", "t_end", "t_step")}
    amps = {k: parse_complex(k, values[k]) for k in COMPLEX_KEYS}
    try:
        # detuning is quoted in units of g1
        params = CouplingParams(reals["g1"], reals["g2"], reals["delta_over_g"] * reals["g1"])
    except ValueError as err:
        raise ConfigError(str(err)) from None
    try:
        coeffs = BellCoefficients(**amps)
    except ValueError as err:
        raise ConfigError(str(err)) from None
    try:
        return RunConfig(params, coeffs, reals["t_start"], reals["t_end"], reals["t_step"],
                         values["out"])
    except ValueError as err:
        raise ConfigError(str(err)) from None
