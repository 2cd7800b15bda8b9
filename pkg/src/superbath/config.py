"""Experiment configuration: JSON schema, loading and conversion to domain objects.

Every block rejects unknown keys.  Energies are in units of J.
"""

import json
from importlib import resources

import jsonschema

from .errors import ConfigError
from .lattice import BathParams
from .selfenergy import EmitterConfig

__all__ = ["SCHEMA_VERSION", "SCHEMA", "COMMANDS", "load_config", "validate_config",
           "bundled_config", "bath_from", "emitters_from"]

SCHEMA_VERSION = 1
COMMANDS = ("bands", "selfenergy", "boundstates", "dynamics", "exchange", "wavefunction",
            "protocol", "oracle", "validate")

_NUM = {"type": "number"}
_POS = {"type": "number", "exclusiveMinimum": 0}
_NONNEG = {"type": "number", "minimum": 0}
_INT1 = {"type": "integer", "minimum": 1}


def _obj(props, required=()):
    return {"type": "object", "properties": props, "required": list(required),
            "additionalProperties": False}


_RANGE = _obj({"min": _NUM, "max": _NUM, "num": _INT1}, ["min", "max", "num"])

SCHEMA = _obj({
    "schema_version": {"const": SCHEMA_VERSION},
    "description": {"type": "string"},
    "bath": _obj({"J": _POS, "delta": _NONNEG, "N": {"type": "integer", "minimum": 2}}),
    "emitters": {"type": "array", "maxItems": 8, "items": _obj({
        "sublattice": {"enum": ["A", "B", "a", "b"]},
        "site": {"type": "array", "items": {"type": "integer"}, "minItems": 2, "maxItems": 2},
        "Delta": _NUM,
        "g": _NONNEG,
    })},
    "bands": _obj({"grid_n": _INT1, "dos_grid_n": {"type": "integer", "minimum": 64},
                   "dos_bins": {"type": "integer", "minimum": 32}}),
    "selfenergy": _obj({"energies": _RANGE, "ksum_grid_n": {"type": "integer", "minimum": 0}}),
    "boundstates": _obj({"sweep": _RANGE, "unstable_poles": {"type": "boolean"}}),
    "dynamics": _obj({"t_max": _NONNEG, "num_t": {"type": "integer", "minimum": 2},
                      "grid_n": _INT1, "collective": {"type": "boolean"}}),
    "exchange": _obj({"n_min": _INT1, "n_max": _INT1, "grid_n": _INT1}),
    "wavefunction": _obj({"E_BS": _NUM, "n_axis": _INT1,
                          "q_c": {"type": "number", "exclusiveMinimum": 0, "maximum": 3.141592653589794}}),
    "protocol": _obj({"n_min": _INT1, "n_max": _INT1, "Gamma_star": _NONNEG,
                      "Omega": _NUM, "Delta_L": _NUM, "omega_L": _NUM,
                      "detuning_correction": {"type": "boolean"}, "grid_n": _INT1}),
    "validate": _obj({"N": {"type": "integer", "minimum": 8, "maximum": 128},
                      "quick_N": {"type": "integer", "minimum": 8, "maximum": 128},
                      "t_max": _NONNEG}),
}, ["schema_version"])


def validate_config(cfg):
    """Raise :class:`ConfigError` unless ``cfg`` conforms to the schema."""
    try:
        jsonschema.validate(cfg, SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"{where}: {exc.message}") from None
    return cfg


def load_config(path):
    """Read and validate a JSON config file."""
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: malformed JSON ({exc.msg} at line {exc.lineno})") from None
    return validate_config(cfg)


def bundled_config(command):
    """The example config shipped for ``command``."""
    text = resources.files("superbath").joinpath("configs", f"{command}.json").read_text()
    return validate_config(json.loads(text))


def bath_from(cfg) -> BathParams:
    try:
        return BathParams(**cfg.get("bath", {}))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bath: {exc}") from None


def emitters_from(cfg):
    out = []
    for i, e in enumerate(cfg.get("emitters", [])):
        try:
            out.append(EmitterConfig(**{**e, "site": tuple(e.get("site", (0, 0)))}))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"emitters/{i}: {exc}") from None
    return out
