"""Flat key=value run configuration.

Syntax: one `dotted.key = value` per line; blank lines and `#` comments are
ignored (inline `#` starts a comment).  Keys use dotted prefixes as
namespaces but the file stays flat; duplicate keys are an error.  Every key
must belong to the schema of the command that consumes the file, so typos
are reported with their full dotted path instead of being silently dropped.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass

from .errors import ConfigError

_MISSING = object()


def parse_config_text(text: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got {raw.strip()!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not key or any(not part for part in key.split(".")):
            raise ConfigError(f"line {lineno}: malformed key {key!r}")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key}")
        out[key] = value
    return out


def load_config(path) -> dict[str, str]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return parse_config_text(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None


def config_hash(raw: dict[str, str]) -> str:
    """sha256 over the canonical (sorted key=value) form."""
    canon = "\n".join(f"{k}={raw[k]}" for k in sorted(raw))
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()


_TRUE = {"true", "yes", "on", "1"}
_FALSE = {"false", "no", "off", "0"}


def _coerce(key: str, value: str, typ: str):
    try:
        if typ == "int":
            return int(value)
        if typ == "float":
            return float(value)
        if typ == "bool":
            v = value.lower()
            if v in _TRUE:
                return True
            if v in _FALSE:
                return False
            raise ValueError(value)
        return value
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {value!r} as {typ}") from None


@dataclass(frozen=True)
class Option:
    """Schema entry: value type and default (omit default to require the key)."""

    typ: str                  # int | float | bool | str
    default: object = _MISSING

    @property
    def required(self) -> bool:
        return self.default is _MISSING


def apply_schema(raw: dict[str, str], schema: dict[str, Option]) -> dict[str, object]:
    unknown = sorted(set(raw) - set(schema))
    if unknown:
        raise ConfigError("unknown config key(s): " + ", ".join(unknown))
    out: dict[str, object] = {}
    for key, opt in schema.items():
        if key in raw:
            out[key] = _coerce(key, raw[key], opt.typ)
        elif opt.required:
            raise ConfigError(f"missing required config key: {key}")
        else:
            out[key] = opt.default
    return out
