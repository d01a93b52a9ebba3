"""CSV export with a ``#`` metadata header, and scenario config loading."""
from __future__ import annotations

import csv
import json
import math
import sys
from dataclasses import asdict, dataclass, field, fields
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .errors import InputError
from .model import ModelParams, NumericsConfig, param_names

SCENARIOS = ("fig1_sudden_grid", "fig2_transient_sweep", "fig3_beta_trace", "fig4_eta_sweep",
             "shaking_report", "oracle_check", "custom")


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def metadata(params: ModelParams | None = None, cfg: NumericsConfig | None = None,
             window=None, **extra) -> dict:
    meta = {"artifact_version": __version__}
    if params is not None:
        meta.update({f"param.{k}": v for k, v in asdict(params).items()})
    if cfg is not None:
        for f in fields(cfg):
            if f.name != "window":
                meta[f"numerics.{f.name}"] = getattr(cfg, f.name)
    if window is not None:
        meta["window"] = "[%s, %s]" % (_fmt(window[0]), _fmt(window[1]))
    meta.update(extra)
    return meta


def write_csv(target, header, rows, meta: dict | None = None, *, timestamp: bool = True):
    """Write ``# key: value`` lines, then a header row, then rows at full precision.

    ``target`` is a path or an open text stream; ``"-"`` means stdout.
    """
    own = False
    if target == "-" or target is None:
        fh = sys.stdout
    elif hasattr(target, "write"):
        fh = target
    else:
        fh = open(Path(target), "w", newline="")
        own = True
    try:
        meta = dict(meta or {})
        if timestamp:
            meta["generated"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
        for k, v in meta.items():
            fh.write(f"# {k}: {_fmt(v)}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    finally:
        if own:
            fh.close()


def read_csv(path):
    """Inverse of :func:`write_csv`: returns (meta, header, float array)."""
    meta, lines = {}, []
    with open(path) as fh:
        for line in fh:
            if line.startswith("#"):
                k, _, v = line[1:].partition(":")
                meta[k.strip()] = v.strip()
            elif line.strip():
                lines.append(line)
    rows = list(csv.reader(lines))
    header, body = rows[0], rows[1:]
    data = np.array([[float(x) if x not in ("true", "false") else float(x == "true") for x in r]
                     for r in body]) if body else np.empty((0, len(header)))
    return meta, header, data


# ---- scenario configuration ----

@dataclass(frozen=True)
class SweepSpec:
    param: str
    min: float
    max: float
    count: int
    spacing: str = "lin"

    def __post_init__(self):
        if self.param not in param_names():
            raise InputError(f"sweep.param: {self.param!r} is not one of {param_names()}")
        if int(self.count) != self.count or self.count < 2:
            raise InputError(f"sweep.count: must be an integer >= 2, got {self.count!r}")
        if self.spacing not in ("lin", "log"):
            raise InputError(f"sweep.spacing: must be 'lin' or 'log', got {self.spacing!r}")
        if not (math.isfinite(self.min) and math.isfinite(self.max)) or self.max < self.min:
            raise InputError("sweep.min/max: need finite values with min <= max")
        if self.spacing == "log" and self.min <= 0:
            raise InputError("sweep.min: log spacing needs min > 0")

    def values(self) -> np.ndarray:
        if self.spacing == "log":
            return np.geomspace(self.min, self.max, int(self.count))
        return np.linspace(self.min, self.max, int(self.count))


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: str = "custom"
    params: ModelParams = field(default_factory=ModelParams)
    numerics: NumericsConfig = field(default_factory=NumericsConfig)
    sweep: SweepSpec | None = None
    output: str = "-"
    workers: int = 1

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise InputError(f"scenario: {self.scenario!r} is not one of {SCENARIOS}")
        if int(self.workers) != self.workers or self.workers < 1:
            raise InputError("workers: must be an integer >= 1")


_TOP = {"scenario", "params", "numerics", "sweep", "output", "workers"}


def _check_keys(section, data, allowed):
    if not isinstance(data, dict):
        raise InputError(f"{section}: expected a mapping, got {type(data).__name__}")
    bad = sorted(set(data) - set(allowed))
    if bad:
        raise InputError(f"{section}: unknown key(s) {bad}; allowed {sorted(allowed)}")


def _build(cls, section, data):
    _check_keys(section, data, [f.name for f in fields(cls)])
    try:
        return cls(**data)
    except TypeError as exc:
        raise InputError(f"{section}: {exc}") from None
    except InputError as exc:
        raise InputError(f"{section}: {exc}") from None


def config_from_dict(data: dict) -> ScenarioConfig:
    _check_keys("config", data, _TOP)
    kw = {k: data[k] for k in ("scenario", "output", "workers") if k in data}
    if "params" in data:
        kw["params"] = _build(ModelParams, "params", data["params"])
    if "numerics" in data:
        num = dict(data["numerics"]) if isinstance(data["numerics"], dict) else data["numerics"]
        if isinstance(num, dict) and num.get("window") is not None:
            num["window"] = tuple(num["window"])
        kw["numerics"] = _build(NumericsConfig, "numerics", num)
    if data.get("sweep") is not None:
        kw["sweep"] = _build(SweepSpec, "sweep", data["sweep"])
    return ScenarioConfig(**kw)


def load_config(path) -> ScenarioConfig:
    """Read a YAML or JSON scenario file (JSON is a YAML subset; ``.json`` is parsed strictly)."""
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise InputError(f"cannot read config {p}: {exc}") from None
    try:
        data = json.loads(text) if p.suffix == ".json" else yaml.safe_load(text)
    except (json.JSONDecodeError, yaml.YAMLError) as exc:
        raise InputError(f"config {p} does not parse: {exc}") from None
    return config_from_dict(data or {})
