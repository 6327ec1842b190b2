"""key = value configuration files.

Recognized keys::

    qmul_tc_choice = 54          # one-digit quaternary multiplier count, 54..76
    max_fanout = 4               # buffer generated circuits to this fan-out
    code_map = positional        # or gray
    adder_variant = qfa_v3:roosta_3ps
    half_adder_tc = 16
    nqi_tc = 4                   # likewise iqi_tc, pqi_tc
    tc.<primitive key> = <count> # any other transistor-count override
"""
from __future__ import annotations

import configparser
from pathlib import Path

from .generators import GeneratorConfig

_SECTION = "mvlc"
_SHORTCUTS = {"half_adder_tc": "half_adder_binary", "nqi_tc": "nqi", "iqi_tc": "iqi", "pqi_tc": "pqi"}


class ConfigError(ValueError):
    pass


def parse_config(text: str) -> GeneratorConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",), interpolation=None)
    parser.optionxform = str
    try:
        parser.read_string(f"[{_SECTION}]\n{text}")
    except configparser.Error as e:
        raise ConfigError(str(e)) from None
    values = dict(parser[_SECTION])
    kwargs, overrides = {}, {}
    try:
        for key, raw in values.items():
            if key in ("qmul_tc_choice", "max_fanout"):
                kwargs[key] = int(raw)
            elif key in ("code_map", "adder_variant"):
                kwargs[key] = raw
            elif key in _SHORTCUTS:
                overrides[_SHORTCUTS[key]] = int(raw)
            elif key.startswith("tc."):
                overrides[key[3:]] = int(raw)
            else:
                raise ConfigError(f"unknown config key {key!r}")
        config = GeneratorConfig(tc_overrides=tuple(sorted(overrides.items())), **kwargs)
        config.catalog()
    except ConfigError:
        raise
    except (ValueError, KeyError) as e:
        raise ConfigError(str(e)) from None
    return config


def load_config(path) -> GeneratorConfig:
    return parse_config(Path(path).read_text(encoding="utf-8"))
