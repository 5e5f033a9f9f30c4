"""Strict YAML configuration: schema check, dotted overrides, provenance.

The shipped ``data/default.yaml`` doubles as the schema. A config must carry
every key it has and nothing else; values must match the default's type.
"""

from __future__ import annotations

import copy
import math
import re
from importlib import resources
from pathlib import Path

import numpy as np
import yaml

from glvsim import MOLECULES
from glvsim.channel import MIN_SEPARATION, ChannelConfig
from glvsim.loss import LossModel, LossParameterError
from glvsim.parameters import ENZYME_NAMES, EnzymeParams, LeafParams, MoleculeParams, WindRegime
from glvsim.receiver import ReceiverParams
from glvsim.uptake import MissingParameterError, UptakeParams
from glvsim.units import Environment
from glvsim.wind import WindModel

SCENARIOS = ("point_to_point", "linearity_pilot", "frequency_response", "sensitivity_heatmap",
             "distance_sweep", "alarm_map", "single_glv_comparison")

PILOT_MODES = ("constant", "single_pulse", "periodic")
PILOT_INPUTS = MOLECULES + ("ALL",)

# Sections holding published table values; everything else is a run setting.
PHYSICAL_SECTIONS = ("environment", "sampling", "molecules", "leaf", "enzymes", "transmitter.symbol_period_s",
                     "wind.regimes", "loss.mean", "loss.cv", "loss.overrides", "receiver.alarm_threshold_um", "geometry")

PROFILES = {
    "desk": [],
    "paper": [
        "campaigns.point_to_point.horizon_s=36000.0",
        "campaigns.distance_sweep.horizon_s=36000.0",
        "campaigns.distance_sweep.d_max=2.0",
        "campaigns.alarm_map.horizon_s=36000.0",
        "campaigns.alarm_map.snapshots_h=[1.0, 3.0, 6.0, 10.0]",
        "campaigns.alarm_map.x=[-2.0, 2.0, 40]",
        "campaigns.alarm_map.y=[-2.0, 2.0, 40]",
        "campaigns.linearity_pilot.durations_s=[600.0, 1800.0, 3600.0]",
        "campaigns.single_glv_comparison.horizon_s=36000.0",
    ],
}


class ConfigError(ValueError):
    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("invalid configuration:\n" + "\n".join(f"  - {p}" for p in self.problems))


class _StrictLoader(yaml.SafeLoader):
    pass


def _mapping_no_duplicates(loader, node, deep=False):
    seen = set()
    for key_node, _ in node.value:
        key = loader.construct_object(key_node, deep=deep)
        if key in seen:
            raise ConfigError([f"duplicate key {key!r} (line {key_node.start_mark.line + 1})"])
        seen.add(key)
    return loader.construct_mapping(node, deep=deep)


_StrictLoader.add_constructor(yaml.resolver.BaseResolver.DEFAULT_MAPPING_TAG, _mapping_no_duplicates)
# YAML 1.1 reads 1e-4 (no dot, unsigned exponent) as a string; accept it as a float
_StrictLoader.add_implicit_resolver(
    "tag:yaml.org,2002:float",
    re.compile(r"""^(?:[-+]?(?:[0-9][0-9_]*)\.[0-9_]*(?:[eE][-+]?[0-9]+)?
                |[-+]?(?:[0-9][0-9_]*)(?:[eE][-+]?[0-9]+)
                |\.[0-9_]+(?:[eE][-+]?[0-9]+)?
                |[-+]?\.(?:inf|Inf|INF)
                |\.(?:nan|NaN|NAN))$""", re.X),
    list("-+0123456789."))


def load_yaml(text_or_path) -> dict:
    if isinstance(text_or_path, Path) or (isinstance(text_or_path, str) and "\n" not in text_or_path
                                          and Path(text_or_path).exists()):
        text = Path(text_or_path).read_text()
    else:
        text = text_or_path
    try:
        data = yaml.load(text, Loader=_StrictLoader)
    except yaml.YAMLError as exc:
        raise ConfigError([f"YAML parse error: {exc}"]) from exc
    if not isinstance(data, dict):
        raise ConfigError(["top level must be a mapping"])
    # a run manifest embeds the config it ran with
    if "manifest_version" in data:
        data = data["config"]
    return _normalise_keys(data)


def _normalise_keys(obj):
    # YAML reads unquoted 85A as a string but 91R too; keep every key a string
    if isinstance(obj, dict):
        return {str(k): _normalise_keys(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_normalise_keys(v) for v in obj]
    return obj


def default_path() -> Path:
    return Path(str(resources.files("glvsim") / "data" / "default.yaml"))


def default_raw() -> dict:
    return load_yaml(default_path())


def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _check_loss_overrides(data, path: str, problems: list) -> None:
    if not isinstance(data, dict):
        problems.append(f"{path}: expected a mapping")
        return
    for m, sub in data.items():
        if m not in MOLECULES:
            problems.append(f"{path}.{m}: unknown molecule")
        elif not isinstance(sub, dict) or not sub or set(sub) - {"mean", "cv"}:
            problems.append(f"{path}.{m}: expected a mapping with 'mean' and/or 'cv'")
        elif not all(_is_number(v) for v in sub.values()):
            problems.append(f"{path}.{m}: values must be numbers")


def _check_schema(data, ref, path: str, problems: list) -> None:
    if path == "loss.overrides":
        _check_loss_overrides(data, path, problems)
        return
    if isinstance(ref, dict):
        if not isinstance(data, dict):
            problems.append(f"{path or '<root>'}: expected a mapping")
            return
        for key in ref:
            if key not in data:
                problems.append(f"{_join(path, key)}: missing key")
        for key in data:
            if key not in ref:
                problems.append(f"{_join(path, key)}: unknown key")
            else:
                _check_schema(data[key], ref[key], _join(path, key), problems)
        return
    if ref is None:
        return
    if data is None:
        if path.endswith(".r_liq"):
            return
        problems.append(f"{path}: value must not be null")
        return
    if isinstance(ref, bool):
        if not isinstance(data, bool):
            problems.append(f"{path}: expected true/false, got {data!r}")
    elif isinstance(ref, int):
        if not (isinstance(data, int) and not isinstance(data, bool)):
            problems.append(f"{path}: expected an integer, got {data!r}")
    elif isinstance(ref, float):
        if not _is_number(data):
            problems.append(f"{path}: expected a number, got {data!r}")
    elif isinstance(ref, str):
        if not isinstance(data, str):
            problems.append(f"{path}: expected a string, got {data!r}")
    elif isinstance(ref, list):
        if not isinstance(data, list):
            problems.append(f"{path}: expected a list, got {data!r}")
        elif ref and all(_is_number(v) for v in ref) and not all(_is_number(v) for v in data):
            problems.append(f"{path}: expected a list of numbers")
        elif ref and all(isinstance(v, str) for v in ref) and not all(isinstance(v, str) for v in data):
            problems.append(f"{path}: expected a list of strings")


def _join(path: str, key: str) -> str:
    return f"{path}.{key}" if path else str(key)


def _get(data: dict, dotted: str):
    node = data
    for part in dotted.split("."):
        node = node[part]
    return node


def _parse_value(text: str):
    return _normalise_keys(yaml.load(text, Loader=_StrictLoader))


def apply_overrides(data: dict, overrides, problems: list | None = None) -> dict:
    """Return a copy of ``data`` with ``key.path=value`` overrides applied.

    Problems are appended to ``problems`` when given, otherwise raised.
    """
    out = copy.deepcopy(data)
    collect = problems is not None
    problems = problems if collect else []
    for item in overrides or ():
        if "=" not in item:
            problems.append(f"override {item!r}: expected key=value")
            continue
        key, text = item.split("=", 1)
        parts = key.strip().split(".")
        node = out
        for part in parts[:-1]:
            if not isinstance(node, dict) or part not in node:
                node = None
                break
            node = node[part]
        if not isinstance(node, dict) or parts[-1] not in node:
            problems.append(f"override {key!r}: unknown key")
            continue
        try:
            node[parts[-1]] = _parse_value(text)
        except (yaml.YAMLError, ConfigError) as exc:
            problems.append(f"override {key!r}: cannot parse value ({exc})")
    if problems and not collect:
        raise ConfigError(problems)
    return out


def provenance(path: str, value, reference: dict) -> str:
    try:
        ref = _get(reference, path)
    except (KeyError, TypeError):
        return "user"
    if value != ref:
        return "user"
    return "placeholder" if path.endswith(".r_liq") else "paper-table"


def _leaves(data, prefix=""):
    if isinstance(data, dict):
        for k, v in data.items():
            yield from _leaves(v, _join(prefix, k))
    else:
        yield prefix, data


class Setup:
    """A validated configuration plus builders for the model objects."""

    def __init__(self, raw: dict, overrides=(), profile: str = "desk"):
        self.raw = raw
        self.overrides = list(overrides)
        self.profile = profile

    # -- scalars -----------------------------------------------------------
    @property
    def scenario(self) -> str:
        return self.raw["scenario"]

    @property
    def seed(self) -> int:
        return int(self.raw["seed"])

    @property
    def sample_rate_hz(self) -> float:
        return float(self.raw["sampling"]["sample_rate_hz"])

    @property
    def c_v0(self) -> float:
        return float(self.raw["receiver"]["alarm_threshold_um"])

    def campaign(self, name: str) -> dict:
        return self.raw["campaigns"][name]

    # -- builders ----------------------------------------------------------
    def environment(self) -> Environment:
        return Environment(**self.raw["environment"])

    def molecules(self) -> dict:
        return {m: MoleculeParams(name=m, **self.raw["molecules"][m]) for m in MOLECULES}

    def leaf(self) -> LeafParams:
        return LeafParams(**self.raw["leaf"])

    def enzymes(self) -> dict:
        k_e = self.raw["enzymes"]["k_e"]
        return {e: EnzymeParams(name=e, k_e=k_e, **self.raw["enzymes"][e]) for e in ENZYME_NAMES}

    def receiver_params(self) -> ReceiverParams:
        r = self.raw["receiver"]
        return ReceiverParams.build(self.molecules(), self.enzymes(), self.leaf(), self.environment(),
                                    per_stage_absorption=r["per_stage_absorption"],
                                    clamp_absorption=r["clamp_absorption"])

    def wind_regime(self, name: str | None = None) -> WindRegime:
        name = name or self.raw["wind"]["regime"]
        reg = self.raw["wind"]["regimes"][name]
        return WindRegime(tuple(reg["mean"]), tuple(reg["std"]))

    def wind_model(self, name: str | None = None) -> WindModel:
        reg = self.wind_regime(name)
        return WindModel(reg.mean, reg.std, self.sample_rate_hz, self.seed)

    def loss_models(self) -> dict:
        lo = self.raw["loss"]
        out = {}
        for m in MOLECULES:
            own = lo["overrides"].get(m, {})
            out[m] = LossModel(own.get("mean", lo["mean"]), own.get("cv", lo["cv"]), lo["enabled"])
        return out

    def channel_config(self, horizon_s: float, tree_eps: float | None = None) -> ChannelConfig:
        ch = self.raw["channel"]
        eps = ch["tree_eps"] if tree_eps is None else tree_eps
        return ChannelConfig(tx_position=tuple(self.raw["geometry"]["tx"]),
                             diffusivity={m: self.raw["molecules"][m]["diffusivity"] for m in MOLECULES},
                             sample_rate_hz=self.sample_rate_hz, horizon_s=horizon_s,
                             emission_substeps=ch["emission_substeps"], method=ch["method"],
                             tree_eps=eps, truncation=ch["truncation"])

    def amplitudes(self) -> dict:
        return {m: float(self.raw["molecules"][m]["emission_amplitude"]) for m in MOLECULES}

    def carbons(self) -> dict:
        return {m: int(self.raw["molecules"][m]["carbons"]) for m in MOLECULES}

    def parameter_table(self) -> list[tuple[str, object, str]]:
        ref = default_raw()
        rows = []
        for section in PHYSICAL_SECTIONS:
            sub = _get(self.raw, section)
            for path, value in _leaves(sub, section):
                rows.append((path, value, provenance(path, value, ref)))
        return rows

    def to_dict(self) -> dict:
        return copy.deepcopy(self.raw)


def _semantic_problems(raw: dict) -> list[str]:
    problems = []
    s = Setup(raw)

    def attempt(label, fn):
        try:
            return fn()
        except (ValueError, TypeError, KeyError) as exc:
            problems.append(f"{label}: {exc}")
            return None

    if raw["scenario"] not in SCENARIOS:
        problems.append(f"scenario: unknown scenario {raw['scenario']!r}; choose from {', '.join(SCENARIOS)}")
    if raw["seed"] < 0:
        problems.append("seed: must be >= 0")
    env = attempt("environment", s.environment)
    mols = attempt("molecules", s.molecules)
    leaf = attempt("leaf", s.leaf)
    attempt("enzymes", s.enzymes)
    if raw["enzymes"]["k_e"] <= 0:
        problems.append("enzymes.k_e: must be > 0")
    if mols and leaf and env:
        for m in MOLECULES:
            try:
                UptakeParams(mols[m], leaf, env)
            except MissingParameterError as exc:
                problems.append(f"molecules.{m}.r_liq: {exc}")
            except ValueError as exc:
                problems.append(f"molecules.{m}: {exc}")
    fs = raw["sampling"]["sample_rate_hz"]
    if not fs > 0:
        problems.append("sampling.sample_rate_hz: must be > 0")
    tx = raw["transmitter"]
    if fs > 0 and tx["symbol_period_s"] > 0:
        n = tx["symbol_period_s"] * fs
        if abs(n - round(n)) > 1e-9 or round(n) < 1:
            problems.append("transmitter.symbol_period_s: must be a whole number of samples")
    else:
        problems.append("transmitter.symbol_period_s: must be > 0")
    if not 0 <= tx["p_one"] <= 1:
        problems.append("transmitter.p_one: must lie in [0, 1]")
    if tx["bits"] is not None and (not isinstance(tx["bits"], str) or set(tx["bits"]) - {"0", "1"}):
        problems.append("transmitter.bits: must be null or a string of 0/1")
    regimes = raw["wind"]["regimes"]
    for name, reg in regimes.items():
        if not isinstance(reg, dict) or set(reg) != {"mean", "std"}:
            problems.append(f"wind.regimes.{name}: needs exactly 'mean' and 'std'")
            continue
        if len(reg["mean"]) != 2 or len(reg["std"]) != 2 or any(v < 0 for v in reg["std"]):
            problems.append(f"wind.regimes.{name}: mean and std are 2-vectors with std >= 0")
    if raw["wind"]["regime"] not in regimes:
        problems.append(f"wind.regime: unknown regime {raw['wind']['regime']!r}")
    lo = raw["loss"]
    for m in (None,) + MOLECULES:
        own = lo["overrides"].get(m, {}) if m else {}
        if m and not own:
            continue
        try:
            LossModel(own.get("mean", lo["mean"]), own.get("cv", lo["cv"]), True)
        except LossParameterError as exc:
            problems.append(f"loss{'.overrides.' + m if m else ''}: {exc}")
    if not raw["receiver"]["alarm_threshold_um"] >= 0:
        problems.append("receiver.alarm_threshold_um: must be >= 0")
    if raw["receiver"]["substeps"] < 1:
        problems.append("receiver.substeps: must be >= 1")
    geo = raw["geometry"]
    for key in ("tx", "rx", "rx_glv"):
        if len(geo[key]) != 3:
            problems.append(f"geometry.{key}: must be a 3-vector")
    if not problems:
        for key in ("rx", "rx_glv"):
            if math.dist(geo[key], geo["tx"]) <= MIN_SEPARATION:
                problems.append(f"geometry.{key}: within {MIN_SEPARATION} m of the transmitter")
    ch = raw["channel"]
    attempt("channel", lambda: s.channel_config(1.0))
    if ch["row_block"] < 1:
        problems.append("channel.row_block: must be >= 1")
    problems += _campaign_problems(raw, fs)
    return problems


def _campaign_problems(raw: dict, fs: float) -> list[str]:
    problems = []
    c = raw["campaigns"]
    for name in ("point_to_point", "distance_sweep", "alarm_map", "single_glv_comparison"):
        if not c[name]["horizon_s"] > 0:
            problems.append(f"campaigns.{name}.horizon_s: must be > 0")
    p = c["linearity_pilot"]
    for m in p["modes"]:
        if m not in PILOT_MODES:
            problems.append(f"campaigns.linearity_pilot.modes: unknown mode {m!r}")
    for m in p["inputs"]:
        if m not in PILOT_INPUTS:
            problems.append(f"campaigns.linearity_pilot.inputs: unknown input {m!r}")
    if any(v <= 0 for v in p["scaling_factors"]):
        problems.append("campaigns.linearity_pilot.scaling_factors: must be > 0")
    if any(v <= 0 for v in p["durations_s"]):
        problems.append("campaigns.linearity_pilot.durations_s: must be > 0")
    for key in ("baseline", "pulse_on_s", "pulse_off_s"):
        if not p[key] > 0:
            problems.append(f"campaigns.linearity_pilot.{key}: must be > 0")
    f = c["frequency_response"]
    if not f["amplitude"] > 0:
        problems.append("campaigns.frequency_response.amplitude: must be > 0")
    if not 0 < f["f_min_hz"] <= f["f_max_hz"]:
        problems.append("campaigns.frequency_response: need 0 < f_min_hz <= f_max_hz")
    if fs > 0 and f["f_max_hz"] > fs / 4:
        problems.append(f"campaigns.frequency_response.f_max_hz: must be <= fs/4 = {fs / 4:g} Hz")
    if f["n_freqs"] < 1 or f["min_periods"] < 20:
        problems.append("campaigns.frequency_response: n_freqs >= 1 and min_periods >= 20 required")
    if not 0 <= f["discard_fraction"] < 1:
        problems.append("campaigns.frequency_response.discard_fraction: must lie in [0, 1)")
    for m in f["molecules"]:
        if m not in MOLECULES:
            problems.append(f"campaigns.frequency_response.molecules: unknown molecule {m!r}")
    h = c["sensitivity_heatmap"]
    if any(v <= 0 for v in h["scale_85A"] + h["scale_91R"]) or not h["scaling_factor"] > 0:
        problems.append("campaigns.sensitivity_heatmap: scales must be > 0")
    if h["mode"] not in PILOT_MODES or h["input"] not in PILOT_INPUTS:
        problems.append("campaigns.sensitivity_heatmap: unknown mode or input")
    if not h["duration_s"] > 0:
        problems.append("campaigns.sensitivity_heatmap.duration_s: must be > 0")
    if c["single_glv_comparison"]["regime"] not in raw["wind"]["regimes"]:
        problems.append("campaigns.single_glv_comparison.regime: unknown regime")
    d = c["distance_sweep"]
    if d["regime"] not in raw["wind"]["regimes"]:
        problems.append(f"campaigns.distance_sweep.regime: unknown regime {d['regime']!r}")
    if not MIN_SEPARATION < d["d_min"] <= d["d_max"] or d["n_points"] < 1:
        problems.append(f"campaigns.distance_sweep: need {MIN_SEPARATION} < d_min <= d_max and n_points >= 1")
    a = c["alarm_map"]
    for r in a["regimes"]:
        if r not in raw["wind"]["regimes"]:
            problems.append(f"campaigns.alarm_map.regimes: unknown regime {r!r}")
    for axis in ("x", "y"):
        g = a[axis]
        if len(g) != 3 or not isinstance(g[2], int) or g[2] < 1 or (g[2] > 1 and not g[0] < g[1]):
            problems.append(f"campaigns.alarm_map.{axis}: expected [min, max, count] with min < max")
    if not isinstance(a["receiver_substeps"], int) or a["receiver_substeps"] < 1:
        problems.append("campaigns.alarm_map.receiver_substeps: must be an integer >= 1")
    if a["tree_eps"] < 0:
        problems.append("campaigns.alarm_map.tree_eps: must be >= 0")
    if any(t < 0 or t * 3600 > a["horizon_s"] for t in a["snapshots_h"]):
        problems.append("campaigns.alarm_map.snapshots_h: snapshots must lie in [0, horizon]")
    if not problems:
        gx, gy = np.meshgrid(grid_axis(a["x"]), grid_axis(a["y"]))
        tx = raw["geometry"]["tx"]
        dz = raw["geometry"]["rx"][2] - tx[2]
        if np.any(np.sqrt((gx - tx[0]) ** 2 + (gy - tx[1]) ** 2 + dz ** 2) <= MIN_SEPARATION):
            problems.append("campaigns.alarm_map: a grid point lies on the transmitter")
    return problems


def grid_axis(spec) -> np.ndarray:
    lo, hi, n = spec
    return np.linspace(float(lo), float(hi), int(n))


def load_config(path=None, overrides=(), profile: str = "desk", seed: int | None = None) -> Setup:
    """Load, override, schema-check and validate a configuration."""
    if profile not in PROFILES:
        raise ConfigError([f"unknown profile {profile!r}; choose from {', '.join(PROFILES)}"])
    raw = load_yaml(path) if path is not None else default_raw()
    problems = []
    _check_schema(raw, default_raw(), "", problems)
    if problems:
        raise ConfigError(problems)
    all_overrides = list(PROFILES[profile]) + list(overrides or ())
    if seed is not None:
        all_overrides.append(f"seed={int(seed)}")
    raw = apply_overrides(raw, all_overrides, problems)
    schema = []
    _check_schema(raw, default_raw(), "", schema)
    problems += schema
    if not schema:
        problems += _semantic_problems(raw)
    if problems:
        raise ConfigError(problems)
    return Setup(raw, all_overrides, profile)
