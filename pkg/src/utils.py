import hashlib
import json
import os
import random
from contextlib import contextmanager

import numpy as np
import wandb
import yaml
from yaspin import yaspin
from yaspin.spinners import Spinners


def seed_everything(seed: int):
    """
    Function which fixes the global random state of the libraries used by this repository.
    Every stochastic component of Bluebird draws from its own `np.random.Generator` built with
    `make_rng()`, the global state is fixed only for third party code

    Returns:
        The integer random state

    """

    np.random.seed(seed)
    random.seed(seed)

    return seed


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """
    Documented PRNG of the project: PCG64 seeded through a SeedSequence. Extra integers select an
    independent child stream (e.g. `make_rng(seed, epoch)`), so that adding a consumer of randomness
    never shifts the numbers drawn by another one
    """
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, *stream])))


def log_wandb(parameters_to_log: dict, should_log: bool):
    if should_log is True:
        wandb.log(parameters_to_log)


@contextmanager
def init_wandb(should_log: bool, **kwargs):
    if should_log is True:
        project = kwargs.pop("project", "Bluebird")
        exp_name = kwargs.pop("name", None)

        with wandb.init(project=project, name=exp_name, **kwargs):
            yield
    else:
        yield


def config_hash(config: dict) -> str:
    # sorted keys so that the hash doesn't depend on insertion order
    serialized = json.dumps(config, sort_keys=True, default=str)
    return hashlib.sha256(serialized.encode("utf-8")).hexdigest()


def dump_json(obj, path: str):
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)

    with open(path, "w", encoding="utf-8") as f:
        json.dump(obj, f, indent=2, sort_keys=True)
        f.write("\n")


class IndentedDumper(yaml.Dumper):

    # this dumper indents also sequences other than mappings
    def increase_indent(self, flow=False, *args, **kwargs):
        return super().increase_indent(flow=flow, indentless=False)


class PrintWithSpin:

    def __init__(self, text: str):
        self.text = f"# {text}:"
        self.yaspin_obj = None

    def __enter__(self):

        self.yaspin_obj = yaspin(Spinners.sand, text=self.text, side="right").__enter__()

    def __exit__(self, exc_type, exc_value, traceback):

        if exc_type is None:
            self.yaspin_obj.ok("✔ Done!")
        else:
            self.yaspin_obj.fail("✘ Failed!")

        self.yaspin_obj.__exit__(exc_type, exc_value, traceback)


def format_time(seconds):
    # Convert seconds to minutes and seconds
    minutes, seconds = divmod(seconds, 60)

    # Convert minutes to hours and minutes
    hours, minutes = divmod(minutes, 60)

    # Format the time as a string
    if hours > 0:
        return f"{int(hours)} hours, {int(minutes)} minutes, {int(seconds)} seconds"
    elif minutes > 0:
        return f"{int(minutes)} minutes, {int(seconds)} seconds"
    else:
        return f"{int(seconds)} seconds"
