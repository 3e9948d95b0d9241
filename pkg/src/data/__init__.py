from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

from src import ASSETS_DIR, ConfigError
from src.data.synth import CHANNELS
from src.data.topics import LdaConfig


def _check_keys(cls, section: dict, section_name: str):
    valid_keys = {dataclass_field.name for dataclass_field in dataclasses.fields(cls)}
    unknown_keys = set(section) - valid_keys
    if unknown_keys:
        raise ConfigError(f"Unknown {section_name} parameters: {sorted(unknown_keys)}")


@dataclass
class SynthParams:
    n_users: int = 64
    signal: float = 1.0
    seed: int = 42
    channels: tuple[str, ...] = CHANNELS
    text_vocab: str = "symptom"
    split_families: bool = False
    tweets_per_user: int = 20
    tokens_per_tweet: int = 8

    @classmethod
    def from_parse(cls, synth_section: dict):
        _check_keys(cls, synth_section, "synth")

        synth_section = dict(synth_section)
        if "channels" in synth_section:
            synth_section["channels"] = tuple(synth_section["channels"])

        return cls(**synth_section)


@dataclass
class DataParams:

    # exactly one between corpus_path and synth is used: a real corpus has the precedence
    corpus_path: str = None
    synth: SynthParams = None

    min_posts: int = 10
    max_followers: int = 5000
    train_fraction: float = 0.8

    assets_dir: str = ASSETS_DIR
    embeddings_path: str = None
    embedding_dim: int = 100
    expansion_k: int = 5
    expansion_tau: float = 0.5

    lda: LdaConfig = field(default_factory=LdaConfig)

    @classmethod
    def from_parse(cls, data_section: dict | None):

        data_section = dict(data_section) if data_section is not None else {}
        _check_keys(cls, data_section, "data")

        synth_section = data_section.pop("synth", None)
        lda_section = data_section.pop("lda", None)

        try:
            obj = cls(synth=SynthParams.from_parse(synth_section) if synth_section is not None else None,
                      lda=LdaConfig.from_parse(lda_section),
                      **data_section)
        except (TypeError, ValueError) as e:
            raise ConfigError(f"Invalid data section: {e}") from None

        if obj.corpus_path is None and obj.synth is None:
            raise ConfigError("The data section should specify either 'corpus_path' or a 'synth' sub-section!")

        if obj.min_posts < 1:
            raise ConfigError(f"min_posts should be >= 1, got {obj.min_posts}")

        if not 0 < obj.train_fraction < 1:
            raise ConfigError(f"train_fraction should be in (0, 1), got {obj.train_fraction}")

        return obj
