"""Run configuration: flat ``key=value`` files with dotted sections.

Example::

    channel.family=pd
    channel.W=14
    channel.lam=1
    grid.dt=1e-4
    grid.t_max=1
    state.a=0
    state.b=1
    measures=tsallis:0.2,mtsallis:0.2
    seed=0

Keys given on the command line override keys read from a file.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

from .channels import (
    ADChannel,
    ADState,
    ConstantRate,
    DephasingLorentzian,
    PDChannel,
    PDState,
    RUChannel,
    RUState,
    TimeGrid,
    load_profile_csv,
)
from .coherence import CoherenceMeasure
from .errors import ConfigError, NumericalDomainError
from .nonmarkov import DEFAULT_THRESHOLD, InitialStateSearch
from .volterra import ExponentialKernel

DEFAULTS: dict[str, str] = {
    "channel.family": "pd",
    "channel.profile": "lorentzian",
    "channel.W": "14",
    "channel.lam": "1",
    "grid.dt": "1e-4",
    "grid.t_max": "1",
    "state.a": "0",
    "state.b": "1",
    "state.r1": "1",
    "state.r2": "0",
    "state.r3": "0",
    "measures": "skew",
    "search.n_a": "21",
    "search.n_b": "21",
    "search.refinement": "3",
    "measure.threshold": repr(DEFAULT_THRESHOLD),
    "seed": "0",
}

KNOWN = set(DEFAULTS) | {
    "channel.gamma0",
    "channel.rate_csv",
    "channel.gamma1",
    "channel.gamma2",
    "channel.gamma3",
    "sweep.W",
    "sweep.alpha",
    "sweep.kinds",
    "output.csv",
    "output.svg",
    "output.report",
    "output.states",
}

# Plot presets for the figure analogues. The spectral width is fixed at 1 and
# the time windows are [0, 1] for W = 14 and [0, 5] otherwise.
PRESETS: dict[str, dict[str, str]] = {
    "fig1": {
        "channel.W": "14",
        "grid.dt": "1e-4",
        "grid.t_max": "1",
        "measures": "",
        "sweep.alpha": "0.2,0.8,1.2,1.8",
        "sweep.kinds": "tsallis,mtsallis",
    },
    "fig2": {
        "channel.W": "14",
        "grid.dt": "1e-4",
        "grid.t_max": "1",
        "measures": "",
        "sweep.alpha": "0.001,2",
        "sweep.kinds": "tsallis,mtsallis",
    },
    "fig3": {
        "channel.W": "0.5",
        "grid.dt": "1e-3",
        "grid.t_max": "5",
        "measures": "",
        "sweep.alpha": "0.001,0.2,1.2,2",
        "sweep.kinds": "tsallis,mtsallis",
    },
    "fig4": {
        "grid.dt": "1e-3",
        "grid.t_max": "5",
        "measures": "tsallis:0.2,mtsallis:0.2",
        "sweep.W": "5,10,15,20",
    },
    "fig5": {
        "channel.W": "3",
        "grid.dt": "1e-3",
        "grid.t_max": "5",
        "measures": "tsallis:2,mtsallis:2,skew,l1,relent",
    },
}


def parse_lines(lines) -> dict[str, str]:
    """``key=value`` pairs; blank lines and ``#`` comments are skipped."""
    out = {}
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"line {lineno}: expected key=value, got {raw.rstrip()!r}")
        out[key.strip()] = value.strip()
    return out


def read_config_file(path) -> dict[str, str]:
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_lines(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc


def _float(raw: dict, key: str) -> float:
    try:
        return float(raw[key])
    except KeyError:
        raise ConfigError(f"missing key {key}") from None
    except ValueError:
        raise ConfigError(f"{key}: not a number: {raw[key]!r}") from None


def _int(raw: dict, key: str) -> int:
    try:
        return int(raw[key])
    except ValueError:
        raise ConfigError(f"{key}: not an integer: {raw[key]!r}") from None


def _floats(text: str, key: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"{key}: expected comma-separated numbers, got {text!r}") from None


def _complex(raw: dict, key: str) -> complex:
    try:
        value = complex(raw[key].replace(" ", ""))
    except ValueError:
        raise ConfigError(f"{key}: not a number: {raw[key]!r}") from None
    return value.real if value.imag == 0 else value


@dataclass
class RunConfig:
    """Fully resolved run parameters plus the raw key map they came from."""

    raw: dict[str, str]
    family: str
    grid: TimeGrid
    measures: list[CoherenceMeasure]
    W_values: list[float]
    lam: float
    seed: int
    threshold: float
    outputs: dict[str, str] = field(default_factory=dict)

    @classmethod
    def from_mapping(cls, overrides: dict[str, str], preset: str | None = None) -> "RunConfig":
        raw = dict(DEFAULTS)
        if preset is not None:
            if preset not in PRESETS:
                raise ConfigError(f"unknown preset {preset!r}; choose from {', '.join(PRESETS)}")
            raw.update(PRESETS[preset])
        raw.update(overrides)
        unknown = sorted(set(raw) - KNOWN)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")

        family = raw["channel.family"].lower()
        if family not in ("pd", "ad", "ru"):
            raise ConfigError(f"channel.family must be pd, ad or ru, got {family!r}")
        try:
            grid = TimeGrid(_float(raw, "grid.dt"), _float(raw, "grid.t_max"))
        except NumericalDomainError as exc:
            raise ConfigError(str(exc)) from exc

        alphas = _floats(raw.get("sweep.alpha", ""), "sweep.alpha")
        kinds = [k.strip() for k in raw.get("sweep.kinds", "tsallis").split(",") if k.strip()]
        specs = [m for m in raw["measures"].split(",") if m.strip()]
        specs += [f"{kind}:{al!r}" for kind in kinds for al in alphas]
        try:
            measures = [CoherenceMeasure.parse(m) for m in specs]
        except NumericalDomainError as exc:
            raise ConfigError(f"measures: {exc}") from exc
        if not measures:
            raise ConfigError("no coherence measures selected")
        names = [m.name for m in measures]
        if len(set(names)) != len(names):
            raise ConfigError(f"duplicate measures: {', '.join(names)}")

        W_values = _floats(raw["sweep.W"], "sweep.W") if raw.get("sweep.W") else [_float(raw, "channel.W")]
        lam = _float(raw, "channel.lam")
        if lam <= 0 or any(w <= 0 for w in W_values):
            raise ConfigError("need channel.lam > 0 and W > 0")
        threshold = _float(raw, "measure.threshold")
        if threshold < 0:
            raise ConfigError("measure.threshold must be non-negative")
        outputs = {k.split(".", 1)[1]: v for k, v in raw.items() if k.startswith("output.")}
        cfg = cls(raw, family, grid, measures, W_values, lam, _int(raw, "seed"), threshold, outputs)
        cfg.state()  # validate early
        return cfg

    # ------------------------------------------------------------------

    def canonical(self) -> str:
        """Sorted ``key=value`` lines; output paths excluded so they do not affect the digest."""
        return "".join(f"{k}={v}\n" for k, v in sorted(self.raw.items()) if not k.startswith("output."))

    @property
    def digest(self) -> str:
        return hashlib.sha256(self.canonical().encode("utf-8")).hexdigest()[:16]

    def state(self):
        raw = self.raw
        try:
            if self.family == "pd":
                return PDState(_float(raw, "state.a"), _complex(raw, "state.b"))
            if self.family == "ad":
                return ADState(_float(raw, "state.a"), _complex(raw, "state.b"))
            return RUState(_float(raw, "state.r1"), _float(raw, "state.r2"), _float(raw, "state.r3"))
        except NumericalDomainError as exc:
            raise ConfigError(f"invalid initial state: {exc}") from exc

    def _rate_profile(self, key: str):
        value = self.raw.get(key)
        if value is None:
            raise ConfigError(f"random-unitary channel needs {key} (a constant or a CSV path)")
        try:
            return ConstantRate(float(value))
        except ValueError:
            return load_profile_csv(value)

    def channel(self, W: float | None = None):
        W = self.W_values[0] if W is None else W
        if self.family == "ru":
            return RUChannel(tuple(self._rate_profile(f"channel.gamma{i}") for i in (1, 2, 3)))
        if self.family == "ad":
            return ADChannel(ExponentialKernel.lorentzian(W, self.lam))
        kind = self.raw["channel.profile"].lower()
        if kind == "lorentzian":
            return PDChannel(DephasingLorentzian(W, self.lam))
        if kind == "constant":
            if "channel.gamma0" not in self.raw:
                raise ConfigError("channel.profile=constant needs channel.gamma0")
            return PDChannel(ConstantRate(_float(self.raw, "channel.gamma0")))
        if kind == "tabulated":
            if "channel.rate_csv" not in self.raw:
                raise ConfigError("channel.profile=tabulated needs channel.rate_csv")
            return PDChannel(load_profile_csv(self.raw["channel.rate_csv"]))
        raise ConfigError(f"channel.profile must be lorentzian, constant or tabulated, got {kind!r}")

    def search(self) -> InitialStateSearch:
        try:
            return InitialStateSearch(
                self.family,
                n_a=_int(self.raw, "search.n_a"),
                n_b=_int(self.raw, "search.n_b"),
                refinement=_int(self.raw, "search.refinement"),
                r3=_float(self.raw, "state.r3") if self.family == "ru" else 0.0,
            )
        except NumericalDomainError as exc:
            raise ConfigError(str(exc)) from exc

    @property
    def sweeping_W(self) -> bool:
        return bool(self.raw.get("sweep.W"))
