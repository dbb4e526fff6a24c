"""Run configuration for the end-to-end simplification pipeline.

Config files are flat JSON objects whose keys use dotted section names
(``"decode.beam": 100``). Flat keys keep diffs one-line and make the
manifest snapshot trivially comparable. Unknown keys are rejected so a
typo cannot silently fall back to a default.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, fields, replace
from pathlib import Path

from .candidates import FA_WEIGHTS, FAS_WEIGHTS, RerankWeights


class ConfigError(ValueError):
    """Invalid or inconsistent run configuration."""


#: Named stage bundles. Each entry toggles (loss mode, decode mode,
#: diversity on, clustering on, rerank weights or None).
VARIANTS: dict[str, tuple[str, str, bool, bool, str | None]] = {
    "S2S": ("standard", "greedy", False, False, None),
    "S2S-Loss": ("weighted", "greedy", False, False, None),
    "S2S-FA": ("standard", "beam", False, False, "fa"),
    "S2S-Cluster-FA": ("standard", "beam", False, True, "fa"),
    "S2S-Diverse-FA": ("standard", "beam", True, False, "fa"),
    "S2S-All-FAS": ("weighted", "beam", True, True, "fas"),
    "S2S-All-FA": ("weighted", "beam", True, True, "fa"),
}


def parse_weights(spec: str) -> RerankWeights:
    """Parse a weight preset name or an explicit ``f,a,s`` triple."""
    name = spec.strip().lower()
    if name == "fas":
        return FAS_WEIGHTS
    if name == "fa":
        return FA_WEIGHTS
    parts = name.split(",")
    if len(parts) != 3:
        raise ConfigError(
            f"rerank.weights must be 'fas', 'fa', or three comma-separated numbers, got {spec!r}"
        )
    try:
        f, a, s = (float(p) for p in parts)
    except ValueError as exc:
        raise ConfigError(f"rerank.weights: non-numeric component in {spec!r}") from exc
    try:
        return RerankWeights(beta_f=f, beta_a=a, beta_s=s)
    except ValueError as exc:
        raise ConfigError(f"rerank.weights: {exc}") from exc


@dataclass(frozen=True)
class PipelineConfig:
    """Everything a pipeline run depends on, seeds included."""

    pairs_path: str = ""
    corpus_path: str = ""
    embeddings_path: str = ""
    output_dir: str = "run_out"

    variant: str = "S2S-All-FAS"

    beam_width: int = 100
    delta: float = 1.0
    max_len: int = 24
    cluster_k: int = 20
    weights: str = "fas"
    alpha: float = 2.0
    lm_order: int = 4
    scorer_epochs: int = 60
    sentence_epochs: int = 30
    select_mode: str = "top"  # "top" | "match-length"
    select_offset: int = 0
    split_ratios: tuple[float, float, float] = (0.8, 0.1, 0.1)
    seed: int = 0

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ConfigError(
                f"variant must be one of {sorted(VARIANTS)}, got {self.variant!r}"
            )
        if self.beam_width < 1:
            raise ConfigError(f"decode.beam must be >= 1, got {self.beam_width}")
        if not self.beam_width >= self.cluster_k >= 1:
            raise ConfigError(
                f"need decode.beam >= cluster.k >= 1, got beam={self.beam_width} k={self.cluster_k}"
            )
        if self.delta < 0:
            raise ConfigError(f"decode.delta must be >= 0, got {self.delta}")
        if self.max_len < 2:
            raise ConfigError(f"decode.max_len must be >= 2, got {self.max_len}")
        if self.alpha < 0:
            raise ConfigError(f"loss.alpha must be >= 0, got {self.alpha}")
        if self.lm_order < 1:
            raise ConfigError(f"lm.order must be >= 1, got {self.lm_order}")
        if self.scorer_epochs < 1 or self.sentence_epochs < 1:
            raise ConfigError("training epochs must be >= 1")
        if self.select_mode not in ("top", "match-length"):
            raise ConfigError(
                f"select.mode must be 'top' or 'match-length', got {self.select_mode!r}"
            )
        parse_weights(self.weights)  # sum-to-one and range checks live there

    # -- variant-derived switches ------------------------------------

    @property
    def loss_mode(self) -> str:
        return VARIANTS[self.variant][0]

    @property
    def decode_mode(self) -> str:
        return VARIANTS[self.variant][1]

    @property
    def effective_delta(self) -> float:
        return self.delta if VARIANTS[self.variant][2] else 0.0

    @property
    def clustering_enabled(self) -> bool:
        return VARIANTS[self.variant][3]

    @property
    def rerank_weights(self) -> RerankWeights | None:
        preset = VARIANTS[self.variant][4]
        if preset is None:
            return None
        # explicit weights override only the FAS/FA choice baked into
        # the variant when the user set something non-default
        if self.weights.lower() not in ("fas", "fa"):
            return parse_weights(self.weights)
        return parse_weights(preset)

    def snapshot(self) -> dict:
        """Flat dotted-key view, as it would appear in a config file."""
        out = {}
        for f in fields(self):
            key = _FIELD_TO_KEY[f.name]
            val = getattr(self, f.name)
            if isinstance(val, tuple):
                val = list(val)
            out[key] = val
        return dict(sorted(out.items()))


_KEY_TO_FIELD = {
    "paths.pairs": "pairs_path",
    "paths.corpus": "corpus_path",
    "paths.embeddings": "embeddings_path",
    "paths.out": "output_dir",
    "variant": "variant",
    "decode.beam": "beam_width",
    "decode.delta": "delta",
    "decode.max_len": "max_len",
    "cluster.k": "cluster_k",
    "rerank.weights": "weights",
    "loss.alpha": "alpha",
    "lm.order": "lm_order",
    "scorer.epochs": "scorer_epochs",
    "sentence.epochs": "sentence_epochs",
    "select.mode": "select_mode",
    "select.offset": "select_offset",
    "split.ratios": "split_ratios",
    "seed": "seed",
}
_FIELD_TO_KEY = {v: k for k, v in _KEY_TO_FIELD.items()}

_INT_KEYS = {
    "decode.beam", "decode.max_len", "cluster.k", "lm.order",
    "scorer.epochs", "sentence.epochs", "select.offset", "seed",
}
_FLOAT_KEYS = {"decode.delta", "loss.alpha"}
_PATH_KEYS = ("paths.pairs", "paths.corpus", "paths.embeddings")


def config_from_mapping(raw: dict, overrides: dict | None = None) -> PipelineConfig:
    """Build and validate a config from flat dotted-key mappings."""
    merged = dict(raw)
    if overrides:
        merged.update({k: v for k, v in overrides.items() if v is not None})
    kwargs = {}
    for key, value in merged.items():
        if key not in _KEY_TO_FIELD:
            raise ConfigError(f"unknown config key {key!r}")
        if key in _INT_KEYS:
            if isinstance(value, bool) or not isinstance(value, int):
                raise ConfigError(f"{key} must be an integer, got {value!r}")
        elif key in _FLOAT_KEYS:
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigError(f"{key} must be a number, got {value!r}")
            value = float(value)
        elif key == "split.ratios":
            if not (isinstance(value, (list, tuple)) and len(value) == 3):
                raise ConfigError(f"split.ratios must be a list of three numbers, got {value!r}")
            value = tuple(float(v) for v in value)
        elif not isinstance(value, str):
            raise ConfigError(f"{key} must be a string, got {value!r}")
        kwargs[_KEY_TO_FIELD[key]] = value
    try:
        cfg = PipelineConfig(**kwargs)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    for key in _PATH_KEYS:
        path = getattr(cfg, _KEY_TO_FIELD[key])
        if not path:
            raise ConfigError(f"{key} is required")
        if not Path(path).exists():
            raise ConfigError(f"{key}: no such file: {path}")
    return cfg


def load_config(path, overrides: dict | None = None) -> PipelineConfig:
    """Load a flat-JSON config file; ``overrides`` wins over the file."""
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"config {path} must be a JSON object")
    return config_from_mapping(raw, overrides)


def with_variant(cfg: PipelineConfig, variant: str) -> PipelineConfig:
    if variant not in VARIANTS:
        raise ConfigError(f"variant must be one of {sorted(VARIANTS)}, got {variant!r}")
    return replace(cfg, variant=variant)
