from __future__ import annotations

from dataclasses import dataclass

from requests.structures import CaseInsensitiveDict

from src.data.features import MODALITIES
from src.model import ModelConfig


@dataclass(frozen=True)
class AblationConfig:
    name: str
    modality_mask: tuple[bool, bool, bool, bool] = (True, True, True, True)
    use_tweets: bool = True
    use_modalities: bool = True

    # name - config mapping, filled by `register()`
    str_alias_obj = CaseInsensitiveDict()

    def apply(self, config: ModelConfig) -> ModelConfig:
        return config.replace(modality_mask=self.modality_mask,
                              use_tweets=self.use_tweets,
                              use_modalities=self.use_modalities)

    @classmethod
    def register(cls, ablation: AblationConfig):
        if ablation.name in cls.str_alias_obj:
            raise ValueError(f"Ablation {ablation.name} is already registered!")

        cls.str_alias_obj[ablation.name] = ablation

    @classmethod
    def from_string(cls, ablation_str: str) -> AblationConfig:
        try:
            return cls.str_alias_obj[ablation_str]
        except KeyError:
            raise KeyError(f"Ablation {ablation_str} does not exist!") from None

    @classmethod
    def all_ablations_available(cls, return_str: bool = False) -> list[AblationConfig | str]:
        return list(cls.str_alias_obj.keys()) if return_str else list(cls.str_alias_obj.values())

    @classmethod
    def ablation_exists(cls, ablation_str: str, return_bool: bool = True) -> bool | AblationConfig:
        ablation = cls.from_string(ablation_str)
        return ablation if not return_bool else True


def _register_defaults():

    AblationConfig.register(AblationConfig("MDHAN"))
    AblationConfig.register(AblationConfig("HAN-only", use_modalities=False))
    AblationConfig.register(AblationConfig("MM-only", use_tweets=False))

    # full model without one modality
    for modality in MODALITIES:
        mask = tuple(other != modality for other in MODALITIES)
        AblationConfig.register(AblationConfig(f"MDHAN-{modality}", modality_mask=mask))

    # tweets plus a single modality
    for modality in MODALITIES:
        mask = tuple(other == modality for other in MODALITIES)
        AblationConfig.register(AblationConfig(f"{modality}+HAN", modality_mask=mask))


_register_defaults()
