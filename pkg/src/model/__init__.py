from __future__ import annotations

import dataclasses
from dataclasses import dataclass

from src import ConfigError
from src.model.abstract_model import BluebirdModel


@dataclass
class ModelConfig:

    # registered name of the model to train, MDHAN or NaiveBayes
    model_cls_name: str = "MDHAN"

    embed_dim: int = 100
    hidden: int = 100
    n_max: int = 30
    l_max: int = 200
    mlp_hidden: int = 100
    dropout: float = 0.5
    batch_size: int = 16
    lr: float = 0.001
    epochs: int = 10
    seed: int = 42

    # optional non-overlapping max pooling of the word states, off when None
    max_pool_words: int = None

    # enabled modalities, in the order S, E, T, D
    modality_mask: tuple[bool, bool, bool, bool] = (True, True, True, True)

    # component toggles, HAN-only disables modalities and MM-only disables tweets
    use_tweets: bool = True
    use_modalities: bool = True

    def __post_init__(self):
        self.modality_mask = tuple(bool(enabled) for enabled in self.modality_mask)

        positive_fields = ("embed_dim", "hidden", "n_max", "l_max", "mlp_hidden", "batch_size", "epochs")
        for field_name in positive_fields:
            if getattr(self, field_name) < 1:
                raise ConfigError(f"{field_name} should be >= 1, got {getattr(self, field_name)}")

        if self.lr <= 0:
            raise ConfigError(f"lr should be > 0, got {self.lr}")
        if not 0 <= self.dropout < 1:
            raise ConfigError(f"dropout should be in [0, 1), got {self.dropout}")
        if self.max_pool_words is not None and self.max_pool_words < 1:
            raise ConfigError(f"max_pool_words should be >= 1, got {self.max_pool_words}")
        if len(self.modality_mask) != 4:
            raise ConfigError(f"modality_mask should have 4 entries (S, E, T, D), got {len(self.modality_mask)}")
        if not self.use_tweets and not self.use_modalities:
            raise ConfigError("At least one between use_tweets and use_modalities should be enabled!")

    def replace(self, **changes) -> ModelConfig:
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        config_dict = dataclasses.asdict(self)
        config_dict["modality_mask"] = list(self.modality_mask)
        return config_dict

    @classmethod
    def from_parse(cls, model_section: dict | None):

        model_section = dict(model_section) if model_section is not None else {}

        valid_keys = {field.name for field in dataclasses.fields(cls)}
        unknown_keys = set(model_section) - valid_keys
        if unknown_keys:
            raise ConfigError(f"Unknown model parameters: {sorted(unknown_keys)}")

        try:
            obj = cls(**model_section)
        except TypeError as e:
            raise ConfigError(f"Invalid model section: {e}") from None

        try:
            BluebirdModel.model_exists(obj.model_cls_name)
        except KeyError as e:
            raise ConfigError(str(e.args[0])) from None

        return obj


# imported last: model modules need ModelConfig defined
from .models import *  # noqa: E402
