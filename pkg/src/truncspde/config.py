"""Flat ``key = value`` experiment files and CSV writers.

One key per line, ``#`` starts a comment, lists are comma-separated, and
``chi`` may be written as a fraction such as ``1/6``.  Floats are written
with 17 significant digits so files round-trip exactly.
"""

import csv
import io
from fractions import Fraction
from pathlib import Path

import numpy as np

from .drift import PolynomialDrift
from .harness import ConfigError, ExperimentConfig
from .schemes import SchemeKind

__all__ = [
    "parse_config",
    "load_config",
    "dumps_config",
    "format_float",
    "error_table_csv",
    "snapshot_csv",
    "ERROR_HEADER",
    "SNAPSHOT_HEADER",
    "scheme_from_name",
]

ERROR_HEADER = ("scheme", "N", "mc_runs", "rmse", "stderr_rmse")
SNAPSHOT_HEADER = ("t", "k", "coeff")

_KEYS = (
    "T", "nu", "degree", "coeffs", "chi", "K", "N_ref", "N_list", "mc_runs", "seed",
    "schemes", "indicator_variant", "noise_scale", "xi", "output", "reference", "sup_over_time",
)


def format_float(x):
    return format(float(x), ".17g")


def _parse_number(text, key):
    text = text.strip()
    try:
        if "/" in text:
            return Fraction(text)
        return float(text)
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"{key}: not a number: {text!r}") from None


def _parse_int(text, key):
    try:
        return int(text.strip())
    except ValueError:
        raise ConfigError(f"{key}: not an integer: {text!r}") from None


def _parse_list(text):
    return [part.strip() for part in text.split(",") if part.strip()]


def _parse_bool(text, key):
    v = text.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"{key}: not a boolean: {text!r}")


def _read_xi(spec, base_dir):
    if spec.strip().lower() == "zero":
        return ()
    path = Path(spec.strip())
    if not path.is_absolute() and base_dir is not None:
        path = Path(base_dir) / path
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"xi: cannot read {path}: {exc}") from None
    try:
        return tuple(float(v) for v in text.replace(",", " ").split())
    except ValueError:
        raise ConfigError(f"xi: {path} does not hold numbers") from None


def parse_config(text, base_dir=None):
    """Build an :class:`ExperimentConfig` from file contents.

    Raises :class:`ConfigError` on unknown keys, bad values or violated
    constraints.  Relative ``xi`` paths are resolved against ``base_dir``.
    """
    raw = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        raw[key] = value

    kw = {}
    if "coeffs" in raw:
        coeffs = [float(_parse_number(c, "coeffs")) for c in _parse_list(raw["coeffs"])]
        if "degree" in raw and _parse_int(raw["degree"], "degree") != len(coeffs) - 1:
            raise ConfigError("degree does not match the number of coeffs")
        try:
            kw["drift"] = PolynomialDrift(tuple(coeffs))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    elif "degree" in raw:
        raise ConfigError("degree given without coeffs")
    for key in ("T", "nu", "noise_scale"):
        if key in raw:
            kw[key] = float(_parse_number(raw[key], key))
    if "chi" in raw:
        kw["chi"] = _parse_number(raw["chi"], "chi")
    for key in ("K", "N_ref", "mc_runs", "seed"):
        if key in raw:
            kw[key] = _parse_int(raw[key], key)
    if "N_list" in raw:
        kw["N_list"] = tuple(_parse_int(v, "N_list") for v in _parse_list(raw["N_list"]))
    if "schemes" in raw:
        kw["schemes"] = tuple(_parse_list(raw["schemes"]))
    if "indicator_variant" in raw:
        kw["indicator_variant"] = raw["indicator_variant"].lower()
    if "reference" in raw:
        kw["reference"] = raw["reference"]
    if "sup_over_time" in raw:
        kw["sup_over_time"] = _parse_bool(raw["sup_over_time"], "sup_over_time")
    if "output" in raw:
        kw["output"] = raw["output"]
    if "xi" in raw:
        kw["xi_spec"] = raw["xi"]
        kw["xi"] = _read_xi(raw["xi"], base_dir)
    try:
        return ExperimentConfig(**kw)
    except ConfigError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from None


def load_config(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text, base_dir=path.parent)


def dumps_config(cfg):
    chi = cfg.chi
    chi_text = f"{chi.numerator}/{chi.denominator}" if isinstance(chi, Fraction) else format_float(chi)
    lines = [
        f"T = {format_float(cfg.T)}",
        f"nu = {format_float(cfg.nu)}",
        f"degree = {cfg.drift.degree}",
        "coeffs = " + ", ".join(format_float(a) for a in cfg.drift.coeffs),
        f"chi = {chi_text}",
        f"K = {cfg.K}",
        f"N_ref = {cfg.N_ref}",
        "N_list = " + ", ".join(str(n) for n in cfg.N_list),
        f"mc_runs = {cfg.mc_runs}",
        f"seed = {cfg.seed}",
        "schemes = " + ", ".join(s.value for s in cfg.schemes),
        f"indicator_variant = {cfg.indicator_variant.value}",
        f"noise_scale = {format_float(cfg.noise_scale)}",
        f"xi = {cfg.xi_spec}",
        f"reference = {cfg.reference.value}",
        f"sup_over_time = {'true' if cfg.sup_over_time else 'false'}",
    ]
    if cfg.output is not None:
        lines.append(f"output = {cfg.output}")
    return "\n".join(lines) + "\n"


def error_table_csv(table):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(ERROR_HEADER)
    for r in table:
        w.writerow([r.scheme.value, r.N, r.mc_runs, format_float(r.rmse), format_float(r.stderr_rmse)])
    return buf.getvalue()


def snapshot_csv(path_record):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SNAPSHOT_HEADER)
    for t, state in zip(path_record.times, path_record.states):
        for k, c in enumerate(np.asarray(state), 1):
            w.writerow([format_float(t), k, format_float(c)])
    return buf.getvalue()


def scheme_from_name(name):
    try:
        return SchemeKind(name)
    except ValueError:
        known = ", ".join(s.value for s in SchemeKind)
        raise ConfigError(f"unknown scheme {name!r}; expected one of {known}") from None

