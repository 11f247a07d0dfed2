"""JSON configuration: defaults, dotted overrides, validation, canonical echo.

Every problem found is collected and raised together in one
:class:`~thzlink.errors.ConfigError`.
"""

from __future__ import annotations

import copy
import difflib
import json

from .chanmodel import AlphaMu, MixtureGamma, PathGainSpec, SimplifiedMultipath, Unfaded
from .decoders import DECODER_KINDS, DecoderConfig
from .detect import REGIMES
from .errors import ConfigError
from .harness import SimConfig
from .link import compute_parallelism
from .modem import constellation

SCHEMA_VERSION = 1

# Illustrative defaults; band, distance and antenna gains follow the indoor
# 0.142 THz measurement setup, the fading parameters are placeholders.
DEFAULTS = {
    "schema_version": SCHEMA_VERSION,
    "channel": {
        "carrier_freq_hz": 142e9,
        "bandwidth_hz": 4e9,
        "distance_m": 10.1,
        "absorption_coeff_per_m": 0.0,
        "fading": {"type": "alpha_mu", "alpha": 2.0, "mu": 1.0, "z_hat": 1.0},
    },
    "frame": {
        "num_subcarriers": 64,
        "modulation": "bpsk",
        "code_n": 64,
        "code_k": 57,
        "crc_poly": "0xe21",
        "tx_gain_dbi": 0.0,
        "rx_gain_dbi": 19.0,
    },
    "regime": "psi",
    "regimes": ["hard", "psi", "soft"],
    "decoder": {"kind": "orbgrand", "list_size": 16, "budget": 65536},
    "snr_grid_db": [0.0, 2.0, 4.0, 6.0, 8.0, 10.0],
    "max_frames": 10000,
    "min_block_errors": 100,
    "seed": 1,
    "temperature_k": 300.0,
    "lanes": 1,
}

FADING_FIELDS = {
    "alpha_mu": {"alpha": 2.0, "mu": 1.0, "z_hat": 1.0},
    "mixture_gamma": {"components": [[0.5, 1.5, 2.0], [0.5, 3.0, 2.5]]},
    "multipath": {"mean_num_nlos_paths": 3.0, "los_present": True, "per_path_decay_db": 6.0, "max_excess_delay_s": 5e-9},
    "unfaded": {},
}

_NUMBER = (int, float)


def _nearest(key, options):
    match = difflib.get_close_matches(key, list(options), n=1, cutoff=0.0)
    return f" (did you mean '{match[0]}'?)" if match else ""


def _merge(base, user, prefix, errors):
    """Overlay ``user`` onto ``base``; unknown keys are errors."""
    out = copy.deepcopy(base)
    for key, value in user.items():
        path = f"{prefix}{key}"
        if key not in base:
            errors.append(f"unknown key '{path}'" + _nearest(key, base))
            continue
        if key == "fading":
            out[key] = value
        elif isinstance(base[key], dict):
            if not isinstance(value, dict):
                errors.append(f"'{path}' must be an object")
                continue
            out[key] = _merge(base[key], value, path + ".", errors)
        else:
            out[key] = value
    return out


def _check_fading(fading, errors):
    if not isinstance(fading, dict):
        errors.append("'channel.fading' must be an object")
        return None
    kind = fading.get("type", "alpha_mu")
    if kind not in FADING_FIELDS:
        errors.append(f"unknown fading type '{kind}'" + _nearest(kind, FADING_FIELDS))
        return None
    allowed = FADING_FIELDS[kind]
    resolved = {"type": kind, **copy.deepcopy(allowed)}
    for key, value in fading.items():
        if key == "type":
            continue
        if key not in allowed:
            errors.append(f"unknown key 'channel.fading.{key}' for type '{kind}'" + _nearest(key, allowed))
            continue
        resolved[key] = value
    return resolved


def _typed(cfg, errors):
    def need(path, value, types, what):
        if isinstance(value, bool) or not isinstance(value, types):
            errors.append(f"'{path}' must be {what}, got {value!r}")

    ch, fr, dec = cfg["channel"], cfg["frame"], cfg["decoder"]
    for k in ("carrier_freq_hz", "bandwidth_hz", "distance_m", "absorption_coeff_per_m"):
        need(f"channel.{k}", ch[k], _NUMBER, "a number")
    for k in ("num_subcarriers", "code_n", "code_k"):
        need(f"frame.{k}", fr[k], int, "an integer")
    for k in ("tx_gain_dbi", "rx_gain_dbi"):
        need(f"frame.{k}", fr[k], _NUMBER, "a number")
    for k in ("list_size", "budget"):
        need(f"decoder.{k}", dec[k], int, "an integer")
    for k in ("max_frames", "min_block_errors", "seed", "lanes"):
        need(k, cfg[k], int, "an integer")
    need("temperature_k", cfg["temperature_k"], _NUMBER, "a number")
    if cfg["schema_version"] != SCHEMA_VERSION:
        errors.append(f"unsupported schema_version {cfg['schema_version']!r}; expected {SCHEMA_VERSION}")
    grid = cfg["snr_grid_db"]
    if not isinstance(grid, list) or not grid or not all(isinstance(v, _NUMBER) and not isinstance(v, bool) for v in grid):
        errors.append("'snr_grid_db' must be a non-empty list of numbers")
    if cfg["regime"] not in REGIMES:
        errors.append(f"'regime' must be one of {list(REGIMES)}, got {cfg['regime']!r}")
    regs = cfg["regimes"]
    if not isinstance(regs, list) or not all(r in REGIMES for r in regs):
        errors.append(f"'regimes' must be a list drawn from {list(REGIMES)}")
    if dec["kind"] not in DECODER_KINDS:
        errors.append(f"'decoder.kind' must be one of {list(DECODER_KINDS)}, got {dec['kind']!r}")
    try:
        constellation(str(fr["modulation"]))
    except ValueError as exc:
        errors.append(f"'frame.modulation': {exc}")
    poly = fr["crc_poly"]
    if poly is not None and not isinstance(poly, (str, int)):
        errors.append("'frame.crc_poly' must be a hex string, an integer or null")
    elif isinstance(poly, str):
        try:
            int(poly, 16)
        except ValueError:
            errors.append(f"'frame.crc_poly' is not a hex string: {poly!r}")


def _fading_model(f):
    kind = f["type"]
    if kind == "alpha_mu":
        return AlphaMu(float(f["alpha"]), float(f["mu"]), float(f["z_hat"]))
    if kind == "mixture_gamma":
        return MixtureGamma(tuple(tuple(c) for c in f["components"]))
    if kind == "multipath":
        return SimplifiedMultipath(
            float(f["mean_num_nlos_paths"]), bool(f["los_present"]), float(f["per_path_decay_db"]), float(f["max_excess_delay_s"])
        )
    return Unfaded()


def _parse_poly(poly):
    if poly is None:
        return None
    return int(poly, 16) if isinstance(poly, str) else int(poly)


def resolve(user: dict) -> dict:
    """Merge onto defaults and validate types; returns the resolved dict."""
    errors = []
    if not isinstance(user, dict):
        raise ConfigError("configuration must be a JSON object")
    cfg = _merge(DEFAULTS, user, "", errors)
    fading = _check_fading(cfg["channel"]["fading"], errors)
    if fading is not None:
        cfg["channel"]["fading"] = fading
    if not errors:
        _typed(cfg, errors)
    if errors:
        raise ConfigError(errors)
    return cfg


def to_sim_config(cfg: dict) -> SimConfig:
    """Build a :class:`SimConfig` from a resolved dict, collecting semantic errors."""
    errors = []
    ch, fr, dec = cfg["channel"], cfg["frame"], cfg["decoder"]
    path = fading = None
    try:
        path = PathGainSpec(ch["carrier_freq_hz"], ch["bandwidth_hz"], fr["num_subcarriers"], ch["distance_m"], ch["absorption_coeff_per_m"])
    except ValueError as exc:
        errors.append(f"channel: {exc}")
    try:
        fading = _fading_model(ch["fading"])
    except (ValueError, TypeError, KeyError) as exc:
        errors.append(f"channel.fading: {exc}")
    try:
        compute_parallelism(fr["num_subcarriers"], constellation(fr["modulation"]).q, fr["code_n"])
    except ConfigError as exc:
        errors.extend(exc.errors)
    n, k = fr["code_n"], fr["code_k"]
    if n < 2 or n & (n - 1):
        errors.append(f"'frame.code_n' must be a power of two >= 2, got {n}")
    poly = _parse_poly(fr["crc_poly"])
    deg = 0 if not poly else poly.bit_length() - 1
    if dec["kind"] != "uncoded" and not (deg < k <= n):
        errors.append(f"'frame.code_k' must satisfy {deg} < K <= N, got K={k}, N={n}")
    if errors:
        raise ConfigError(errors)
    try:
        return SimConfig(
            path=path,
            fading=fading,
            modulation=fr["modulation"],
            code_n=n,
            code_k=k,
            crc_poly=poly,
            tx_gain_dbi=float(fr["tx_gain_dbi"]),
            rx_gain_dbi=float(fr["rx_gain_dbi"]),
            regime=cfg["regime"],
            decoder=DecoderConfig(dec["kind"], dec["list_size"], dec["budget"]),
            snr_grid_db=tuple(float(v) for v in cfg["snr_grid_db"]),
            max_frames=cfg["max_frames"],
            min_block_errors=cfg["min_block_errors"],
            seed=cfg["seed"],
            temperature_k=float(cfg["temperature_k"]),
            regimes=tuple(cfg["regimes"]),
            lanes=cfg["lanes"],
        )
    except ValueError as exc:
        raise ConfigError(getattr(exc, "errors", [str(exc)])) from None


def parse_value(text: str):
    """Override values are JSON when they parse as JSON, plain strings otherwise."""
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def apply_overrides(user: dict, overrides) -> dict:
    """Apply ``key.path=value`` overrides, validating each path against the schema."""
    out = copy.deepcopy(user)
    errors = []
    for item in overrides:
        if "=" not in item:
            errors.append(f"override {item!r} is not of the form KEY=VALUE")
            continue
        key, raw = item.split("=", 1)
        parts = key.strip().split(".")
        schema, target = DEFAULTS, out
        ok = True
        for i, part in enumerate(parts):
            last = i == len(parts) - 1
            if schema is not None and part not in schema:
                # fading keys depend on the fading type
                if parts[:2] == ["channel", "fading"] and len(parts) == 3:
                    kind = target.get("type", "alpha_mu") if isinstance(target, dict) else "alpha_mu"
                    allowed = {"type": None, **FADING_FIELDS.get(kind, {})}
                    if part not in allowed:
                        errors.append(f"unknown key '{key}'" + _nearest(part, allowed))
                        ok = False
                        break
                else:
                    errors.append(f"unknown key '{key}'" + _nearest(part, schema))
                    ok = False
                    break
            if last:
                break
            schema = schema.get(part) if isinstance(schema, dict) and isinstance(schema.get(part), dict) else None
            target = target.setdefault(part, {})
        if ok:
            target[parts[-1]] = parse_value(raw)
    if errors:
        raise ConfigError(errors)
    return out


def load(path=None, overrides=(), seed=None):
    """Read, override, resolve and convert. Returns ``(resolved_dict, SimConfig)``."""
    user = {}
    if path is not None:
        try:
            with open(path) as fh:
                user = json.load(fh)
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file is not valid JSON: {exc}") from None
    user = apply_overrides(user, overrides)
    if seed is not None:
        user["seed"] = int(seed)
    cfg = resolve(user)
    return cfg, to_sim_config(cfg)


def dumps(cfg: dict) -> str:
    """Canonical JSON: sorted keys, two-space indent, trailing newline."""
    return json.dumps(cfg, sort_keys=True, indent=2) + "\n"
