"""Campaign configuration: JSON schema, defaults and resolution into model objects."""
from __future__ import annotations

import copy
import json
from dataclasses import dataclass
from pathlib import Path

import jsonschema

from ..errors import ConfigError, ParameterError
from ..fabric import ConstraintLimits, FabricGeometry
from ..impedance import Z_BASE, FrequencyGrid, VnaConfig
from ..mtd import MtdPolicy

FORMAT = 1

_LIMITS = {
    "type": "object",
    "required": ["x_min", "x_max", "y_min", "y_max"],
    "properties": {
        "x_min": {"type": "integer", "minimum": 0},
        "x_max": {"type": "integer", "minimum": 0},
        "y_min": {"type": "integer", "minimum": 0},
        "y_max": {"type": "integer", "minimum": 0},
        "slices": {"type": "array", "items": {"type": "integer", "minimum": 0}, "minItems": 1},
        "route_variants": {"type": "array", "items": {"type": "integer", "minimum": 0}, "minItems": 1},
    },
    "additionalProperties": False,
}

SCHEMA = {
    "type": "object",
    "required": ["scenario", "n_traces", "geometry", "limits", "grid"],
    "properties": {
        "format": {"const": FORMAT},
        "scenario": {"enum": ["cima_dima", "tima"]},
        "n_traces": {"type": "integer", "minimum": 0},
        "campaign_seed": {"type": "integer", "minimum": 0},
        "model_seed": {"type": "integer", "minimum": 0},
        "geometry": {
            "type": "object",
            "required": ["width", "height"],
            "properties": {k: {"type": "integer", "minimum": 1} for k in
                           ("width", "height", "slices_per_clb", "ffs_per_slice", "route_variants")},
            "additionalProperties": False,
        },
        "limits": {"type": "array", "items": _LIMITS, "minItems": 1},
        "grid": {
            "type": "object",
            "required": ["f_start", "f_stop", "n_points"],
            "properties": {
                "f_start": {"type": "number", "exclusiveMinimum": 0},
                "f_stop": {"type": "number", "exclusiveMinimum": 0},
                "n_points": {"type": "integer", "minimum": 2},
                "spacing": {"const": "linear"},
            },
            "additionalProperties": False,
        },
        "vna": {
            "type": "object",
            "properties": {
                "z0": {"type": "number", "exclusiveMinimum": 0},
                "averaging": {"type": "integer", "minimum": 1},
                "noise_sigma": {"oneOf": [{"type": "number", "minimum": 0}, {"const": "calibrate"}]},
                "snr": {"type": "number", "exclusiveMinimum": 0},
                "if_bandwidth_hz": {"type": "number", "exclusiveMinimum": 0},
            },
            "additionalProperties": False,
        },
        "mtd": {
            "type": "object",
            "properties": {
                "slice_mux": {"type": "integer", "minimum": 0},
                "seq_mux": {"type": "boolean"},
                "randomized_pr": {"type": "boolean"},
                "pr_rate": {"type": "integer", "minimum": 1},
                "seed": {"type": "integer", "minimum": 0, "maximum": 2 ** 64 - 1},
                "limits": {"type": "array", "items": _LIMITS},
            },
            "additionalProperties": False,
        },
        "key": {"oneOf": [{"type": "string", "pattern": "^([0-9a-fA-F]{2}){1,16}$"}, {"const": "seeded"}]},
        "key_bytes": {"type": "integer", "minimum": 1, "maximum": 16},
        "n_shares": {"type": "integer", "minimum": 2},
        "z_base": {"type": "number", "exclusiveMinimum": 0},
    },
    "additionalProperties": False,
}

DEFAULTS = {
    "format": FORMAT,
    "campaign_seed": 0,
    "model_seed": 0,
    "vna": {"z0": 50.0, "averaging": 200, "noise_sigma": 5e-4, "snr": 0.5, "if_bandwidth_hz": 500.0},
    "mtd": {"slice_mux": 0, "seq_mux": False, "randomized_pr": False, "pr_rate": 1, "seed": 0},
    "key": "seeded",
    "key_bytes": 1,
    "n_shares": 3,
    "z_base": Z_BASE,
}


def _path(err: jsonschema.ValidationError) -> str:
    out = "$"
    for part in err.absolute_path:
        out += f"[{part}]" if isinstance(part, int) else f".{part}"
    return out


def validate_config(obj: dict) -> None:
    """Raise :class:`ConfigError` carrying the JSON path of the first violation."""
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(obj), key=lambda e: (list(map(str, e.absolute_path)), e.message))
    if errors:
        raise ConfigError(errors[0].message, _path(errors[0]))


@dataclass(frozen=True)
class CampaignConfig:
    """A validated, defaults-filled campaign description. ``raw`` is the canonical JSON form."""

    raw: dict

    @classmethod
    def from_json(cls, obj: dict) -> CampaignConfig:
        if not isinstance(obj, dict):
            raise ConfigError("config must be a JSON object")
        validate_config(obj)
        raw = copy.deepcopy(DEFAULTS)
        for key, value in obj.items():
            if isinstance(value, dict) and isinstance(raw.get(key), dict):
                raw[key].update(copy.deepcopy(value))
            else:
                raw[key] = copy.deepcopy(value)
        cfg = cls(raw)
        cfg._check_semantics()
        return cfg

    @classmethod
    def load(cls, path) -> CampaignConfig:
        try:
            obj = json.loads(Path(path).read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc}") from None
        return cls.from_json(obj)

    def with_overrides(self, **changes) -> CampaignConfig:
        """New config with top-level keys replaced; nested dicts merge one level deep."""
        raw = copy.deepcopy(self.raw)
        for key, value in changes.items():
            if isinstance(value, dict) and isinstance(raw.get(key), dict):
                raw[key].update(value)
            else:
                raw[key] = value
        return CampaignConfig.from_json(raw)

    def _check_semantics(self) -> None:
        try:
            geometry = self.geometry
            self.grid
            regions = self.region_limits
            for i, lim in enumerate(regions):
                try:
                    lim.check(geometry)
                except ParameterError as exc:
                    raise ConfigError(str(exc), f"$.limits[{i}]") from None
            for i, lim in enumerate(self.policy.limits):
                try:
                    lim.check(geometry)
                except ParameterError as exc:
                    raise ConfigError(str(exc), f"$.mtd.limits[{i}]") from None
        except ParameterError as exc:
            raise ConfigError(str(exc)) from None
        if self.scenario == "tima" and len(regions) != self.raw["n_shares"]:
            raise ConfigError(f"tima needs one region per share ({self.raw['n_shares']})", "$.limits")
        if self.scenario == "cima_dima" and len(regions) != 1:
            raise ConfigError("cima_dima uses exactly one region", "$.limits")
        if self.policy.limits and len(self.policy.limits) != len(regions):
            raise ConfigError("one reconfiguration range per region", "$.mtd.limits")
        key = self.raw["key"]
        if key != "seeded" and len(key) // 2 < self.key_bytes_needed:
            raise ConfigError(f"key must provide at least {self.key_bytes_needed} bytes", "$.key")

    # resolved views

    @property
    def scenario(self) -> str:
        return self.raw["scenario"]

    @property
    def n_traces(self) -> int:
        return int(self.raw["n_traces"])

    @property
    def campaign_seed(self) -> int:
        return int(self.raw["campaign_seed"])

    @property
    def model_seed(self) -> int:
        return int(self.raw["model_seed"])

    @property
    def z_base(self) -> float:
        return float(self.raw["z_base"])

    @property
    def geometry(self) -> FabricGeometry:
        return FabricGeometry.from_json(self.raw["geometry"])

    @property
    def region_limits(self) -> tuple:
        return tuple(ConstraintLimits.from_json(x) for x in self.raw["limits"])

    @property
    def grid(self) -> FrequencyGrid:
        return FrequencyGrid.from_json(self.raw["grid"])

    @property
    def policy(self) -> MtdPolicy:
        return MtdPolicy.from_json(self.raw["mtd"])

    @property
    def key_bytes_needed(self) -> int:
        return 1 if self.scenario == "cima_dima" else int(self.raw["key_bytes"])

    @property
    def bits_per_region(self) -> int:
        return 8 * self.key_bytes_needed

    @property
    def noise_is_calibrated(self) -> bool:
        return self.raw["vna"]["noise_sigma"] == "calibrate"

    def vna(self, noise_sigma: float | None = None) -> VnaConfig:
        v = self.raw["vna"]
        if noise_sigma is None:
            if self.noise_is_calibrated:
                raise ConfigError("noise_sigma must be calibrated first", "$.vna.noise_sigma")
            noise_sigma = float(v["noise_sigma"])
        return VnaConfig(self.grid, float(v["z0"]), int(v["averaging"]), float(noise_sigma),
                         float(v["if_bandwidth_hz"]))
