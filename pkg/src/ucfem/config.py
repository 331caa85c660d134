"""Flat key-value run configuration with strict validation."""

from dataclasses import dataclass, asdict


class ConfigError(ValueError):
    pass


_KEYS = {
    "preset": str,
    "fem.degree": int,
    "fem.n_levels": int,
    "fem.n_start": int,
    "method": str,
    "trace.N": int,
    "trace.beta": str,     # "auto" or a float literal
    "stab.gamma": float,
    "noise.eps": float,
    "noise.seed": int,
    "data.perturbation": str,
    "solution": str,
    "out": str,
}

_DEFAULTS = {
    "preset": "",
    "fem.degree": 1,
    "fem.n_levels": 3,
    "fem.n_start": 21,
    "method": "two_field",
    "trace.N": 8,
    "trace.beta": "auto",
    "stab.gamma": 1.0,
    "noise.eps": 0.0,
    "noise.seed": 0,
    "data.perturbation": "none",
    "solution": "example_1",
    "out": "results",
}


@dataclass
class RunConfig:
    values: dict

    def __getitem__(self, key):
        return self.values[key]

    def levels(self):
        n = self["fem.n_start"]
        out = []
        for _ in range(self["fem.n_levels"]):
            out.append(n)
            n = 2 * n - 1
        return tuple(out)

    def serialize(self):
        lines = []
        for key in sorted(self.values):
            v = self.values[key]
            lines.append("%s=%s" % (key, ("%.17g" % v) if isinstance(v, float)
                                    else str(v)))
        return "\n".join(lines) + "\n"


def _validate(values):
    out = dict(_DEFAULTS)
    for key, raw in values.items():
        if key not in _KEYS:
            raise ConfigError("unknown config key %r" % (key,))
        try:
            out[key] = _KEYS[key](raw)
        except (TypeError, ValueError) as err:
            raise ConfigError("bad value for %s: %s" % (key, err)) from err
    if out["fem.degree"] not in (1, 2):
        raise ConfigError("fem.degree must be 1 or 2")
    if out["method"] not in ("two_field", "three_field"):
        raise ConfigError("method must be two_field or three_field")
    if out["fem.n_start"] < 2 or out["fem.n_levels"] < 1:
        raise ConfigError("need fem.n_start >= 2 and fem.n_levels >= 1")
    if out["trace.N"] < 1:
        raise ConfigError("trace.N must be >= 1")
    if out["stab.gamma"] < 0 or out["noise.eps"] < 0:
        raise ConfigError("stab.gamma and noise.eps must be >= 0")
    if out["trace.beta"] != "auto":
        try:
            float(out["trace.beta"])
        except ValueError as err:
            raise ConfigError("trace.beta must be 'auto' or a number") from err
    if out["data.perturbation"] not in ("none", "cos2"):
        raise ConfigError("data.perturbation must be 'none' or 'cos2'")
    return RunConfig(values=out)


def parse(text):
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError("line %d: expected key=value" % lineno)
        key, _, raw = line.partition("=")
        values[key.strip()] = raw.strip()
    return _validate(values)


def from_overrides(base=None, **overrides):
    values = {} if base is None else dict(base.values)
    values.update({k: v for k, v in overrides.items() if v is not None})
    return _validate({k: str(v) for k, v in values.items()})
