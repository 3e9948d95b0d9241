from __future__ import annotations

import os

import yaml

from src import GeneralParams, ConfigError
from src.data import DataParams
from src.evaluate import EvalParams
from src.model import ModelConfig


def load_yml_config(yml_path: str | None) -> dict:
    """
    Raw content of the run configuration, an empty configuration if `yml_path` is None
    """

    if yml_path is None:
        return {}

    if not os.path.isfile(yml_path):
        raise FileNotFoundError(f"Configuration file {yml_path} not found!")

    with open(yml_path, "r") as f:
        try:
            yaml_args = yaml.safe_load(f)
        except yaml.YAMLError as e:
            raise ConfigError(f"{yml_path}: invalid YAML ({' '.join(str(e).split())})") from None

    if yaml_args is None:
        return {}
    if not isinstance(yaml_args, dict):
        raise ConfigError(f"{yml_path}: the configuration should be a mapping of parameters")

    return yaml_args


def parse_config(yaml_args: dict) -> tuple[GeneralParams, DataParams | None, ModelConfig, EvalParams]:

    yaml_args = dict(yaml_args)

    data_section = yaml_args.pop("data", None)
    model_section = yaml_args.pop("model", None)
    eval_section = yaml_args.pop("eval", None)

    # after popping every section, only general params remain
    general_section = yaml_args

    general_params = GeneralParams.from_parse(general_section)

    # commands which don't read data (e.g. gradcheck) can run without the data section
    data_params = DataParams.from_parse(data_section) if data_section is not None else None

    model_params = ModelConfig.from_parse(model_section)
    eval_params = EvalParams.from_parse(eval_section)

    return general_params, data_params, model_params, eval_params


def parse_yml_config(yml_path: str):
    return parse_config(load_yml_config(yml_path))
