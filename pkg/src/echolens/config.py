"""Run configuration: a flat INI-style file with sections.

``echolens config init`` prints the defaults; every threshold below ships
with the value used throughout the analyses (edge weight 2, bipartisan
share 0.2, community size 10, polarized cut 0.5, resolution 0.1).
"""

from __future__ import annotations

import configparser
import io
from dataclasses import dataclass, fields

from .errors import ValidationError


@dataclass
class RunConfig:
    # [inputs]
    tweets: str = ""
    probs: str = ""
    keyword_filter: str = "none"  # none | default | path to a JSON filter
    # [outputs]
    out_dir: str = "results"
    # [thresholds]
    min_edge_weight: int = 2
    bipartisan_threshold: float = 0.2
    community_min_size: int = 10
    polarized_threshold: float = 0.5
    louvain_resolution: float = 0.1
    min_in_neighbors: int = 1
    density_bins: int = 50
    # [seeds]
    louvain_seed: int = 42
    control_seed: int = 7
    # [toggles]
    rq1: bool = True
    rq2: bool = True
    rq3: bool = True
    rq4: bool = True
    figures: bool = True
    # [run]
    removal_rounds: int = 10
    threads: int = 1

    def validate(self) -> None:
        if self.min_edge_weight < 1:
            raise ValidationError("min_edge_weight must be >= 1")
        if not 0.0 < self.bipartisan_threshold < 1.0:
            raise ValidationError("bipartisan_threshold must be in (0,1)")
        if self.community_min_size < 1:
            raise ValidationError("community_min_size must be >= 1")
        if not 0.0 <= self.polarized_threshold <= 1.0:
            raise ValidationError("polarized_threshold must be in [0,1]")
        if self.louvain_resolution <= 0:
            raise ValidationError("louvain_resolution must be positive")
        if self.min_in_neighbors < 1:
            raise ValidationError("min_in_neighbors must be >= 1")
        if self.density_bins < 1:
            raise ValidationError("density_bins must be >= 1")
        if self.removal_rounds < 1:
            raise ValidationError("removal_rounds must be >= 1")
        if self.threads < 1:
            raise ValidationError("threads must be >= 1")


_SECTIONS = {
    "inputs": ("tweets", "probs", "keyword_filter"),
    "outputs": ("out_dir",),
    "thresholds": (
        "min_edge_weight",
        "bipartisan_threshold",
        "community_min_size",
        "polarized_threshold",
        "louvain_resolution",
        "min_in_neighbors",
        "density_bins",
    ),
    "seeds": ("louvain_seed", "control_seed"),
    "toggles": ("rq1", "rq2", "rq3", "rq4", "figures"),
    "run": ("removal_rounds", "threads"),
}


def config_to_ini(cfg: RunConfig) -> str:
    parser = configparser.ConfigParser()
    for section, keys in _SECTIONS.items():
        parser[section] = {}
        for key in keys:
            parser[section][key] = str(getattr(cfg, key))
    buf = io.StringIO()
    parser.write(buf)
    return buf.getvalue()


def config_from_ini(text: str) -> RunConfig:
    parser = configparser.ConfigParser()
    parser.read_string(text)
    cfg = RunConfig()
    types = {f.name: f.type for f in fields(RunConfig)}
    for section in parser.sections():
        if section not in _SECTIONS:
            raise ValidationError(f"unknown config section: {section}")
        for key, raw in parser[section].items():
            if key not in _SECTIONS[section]:
                raise ValidationError(f"unknown config key: {section}.{key}")
            kind = types[key]
            if kind == "bool":
                value = raw.strip().lower() in ("1", "true", "yes", "on")
            elif kind == "int":
                value = int(raw)
            elif kind == "float":
                value = float(raw)
            else:
                value = raw
            setattr(cfg, key, value)
    cfg.validate()
    return cfg


def load_config(path: str) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return config_from_ini(fh.read())


def save_config(cfg: RunConfig, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(config_to_ini(cfg))
