from __future__ import annotations

import inspect
from abc import abstractmethod, ABC

import numpy as np
from requests.structures import CaseInsensitiveDict

from src.data.dataset import PreparedUser

# decision threshold on the predicted probability of the depressed class
THRESHOLD = 0.5


class BluebirdModel(ABC):
    str_alias_cls: dict[str, type[BluebirdModel]] = CaseInsensitiveDict()

    # automatically called on subclass definition, will populate the str_alias_cls dict
    def __init_subclass__(cls, **kwargs):
        if not inspect.isabstract(cls):
            cls.str_alias_cls[cls.__name__] = cls

        super().__init_subclass__(**kwargs)

    @abstractmethod
    def predict_proba(self, users: list[PreparedUser]) -> np.ndarray:
        """Probability of the depressed class for each user, without any randomness (dropout off)"""
        raise NotImplementedError

    def predict(self, users: list[PreparedUser]) -> np.ndarray:
        return (self.predict_proba(users) >= THRESHOLD).astype(int)

    @abstractmethod
    def save(self, output_dir: str):
        raise NotImplementedError

    @classmethod
    @abstractmethod
    def load(cls, dir_path: str) -> BluebirdModel:
        raise NotImplementedError

    @classmethod
    def all_models_available(cls, return_str: bool = False) -> list[type[BluebirdModel] | str]:
        return list(cls.str_alias_cls.keys()) if return_str else list(cls.str_alias_cls.values())

    @classmethod
    def model_exists(cls, model_cls_name: str, return_bool: bool = True) -> bool | type[BluebirdModel]:

        try:
            model_cls = cls.str_alias_cls[model_cls_name]
        except KeyError:
            raise KeyError(f"Model {model_cls_name} does not exist!") from None

        # if we arrive at the return clause, model_cls exists that's why we return True directly
        return model_cls if not return_bool else True
