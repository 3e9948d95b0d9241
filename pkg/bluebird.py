from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys

import yaml
from pygit2 import Repository, GitError

from src import SchemaError, ConfigError, GeneralParams
from src.data import DataParams
from src.data.main import synth_main, ingest_main, lda_fit_main, data_main
from src.evaluate import EvalParams
from src.evaluate.main import eval_main, ablate_main, sweep_main, baseline_nb_main
from src.explain import ExplainParams
from src.explain.main import explain_main
from src.model import ModelConfig
from src.model.main import model_main, gradcheck_main
from src.model.trainer import TrainingDivergedError
from src.utils import seed_everything, init_wandb, IndentedDumper
from src.yml_parse import load_yml_config, parse_config

EXIT_OK = 0
EXIT_OTHER = 1
EXIT_USAGE = 2
EXIT_MISSING_FILE = 3
EXIT_SCHEMA = 4
EXIT_DIVERGED = 5

# command -> sub-directory of the experiment where its outputs (and resolved config) are written
COMMAND_PHASE = {
    "synth": "corpus",
    "ingest": "corpus",
    "lda-fit": "lda",
    "features": "dataset",
    "train": "model",
    "eval": "reports",
    "ablate": "reports",
    "sweep": "reports",
    "explain": "explain",
    "gradcheck": "gradcheck",
    "baseline-nb": "baseline_nb",
}


class OneLineArgumentParser(argparse.ArgumentParser):

    # usage errors are reported as a single machine parsable line
    def error(self, message):
        fail("usage", message, EXIT_USAGE)


def fail(kind: str, message: str, exit_code: int):
    message = " ".join(str(message).split())
    print(f"bluebird: error: {kind}: {message}", file=sys.stderr)
    sys.exit(exit_code)


def build_parser() -> argparse.ArgumentParser:

    parser = OneLineArgumentParser(prog="bluebird",
                                   description="Multi-modal depression detection with hierarchical attention")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-c", "--config", default=None,
                        help="The path to the .yml file in which the experiment parameters are specified. Flags "
                             "override the values of the file")
    common.add_argument("--exp-name", default=None, help="Name of the experiment, outputs go to <output-dir>/<exp-name>")
    common.add_argument("--output-dir", default=None, help="Root directory of every experiment")
    common.add_argument("--seed", type=int, default=None,
                        help="Seed of the split, of the synthetic generator, of LDA and of the model")

    subparsers = parser.add_subparsers(dest="command", required=True, parser_class=OneLineArgumentParser)

    synth = subparsers.add_parser("synth", parents=[common], help="Generate a synthetic labeled corpus")
    synth.add_argument("--users", type=int, default=None, help="Number of users (even)")
    synth.add_argument("--signal", type=float, default=None, help="Probability that a depressed user's tweet "
                                                                   "carries the planted signal")
    synth.add_argument("--channels", nargs="+", default=None, choices=["text", "social", "emotion"],
                       help="Channels through which the signal is planted")
    synth.add_argument("--text-vocab", default=None, choices=["symptom", "latent"],
                       help="Vocabulary of the signal-bearing tweets")
    synth.add_argument("--split-families", action="store_true", default=None,
                       help="Each depressed user carries signal through text only or modalities only")
    synth.add_argument("--tweets-per-user", type=int, default=None)

    ingest = subparsers.add_parser("ingest", parents=[common], help="Validate and filter a JSONL corpus")
    ingest.add_argument("--corpus", default=None, help="Path of the JSONL corpus")

    lda_fit = subparsers.add_parser("lda-fit", parents=[common], help="Fit the topic model on the train users")
    lda_fit.add_argument("--topics", type=int, default=None, help="Number of topics K")
    lda_fit.add_argument("--iterations", type=int, default=None, help="Number of Gibbs sweeps")

    features = subparsers.add_parser("features", parents=[common], help="Build the prepared dataset")
    features.add_argument("--embeddings", default=None, help="Path of the word embeddings text file")

    train = subparsers.add_parser("train", parents=[common], help="Train the model (builds the dataset if missing)")
    train.add_argument("--model", default=None, help="Registered model name, MDHAN or NaiveBayes")
    train.add_argument("--epochs", type=int, default=None)
    train.add_argument("--lr", type=float, default=None)
    train.add_argument("--batch-size", type=int, default=None)

    evaluate = subparsers.add_parser("eval", parents=[common], help="Evaluate a trained model on the test users")
    evaluate.add_argument("--checkpoint", required=True, help="Directory of the trained model")

    ablate = subparsers.add_parser("ablate", parents=[common], help="Train and evaluate every ablation configuration")
    ablate.add_argument("--ablations", nargs="+", default=None, help="Ablation names, all of them by default")
    ablate.add_argument("--workers", type=int, default=None, help="Number of worker threads")

    sweep = subparsers.add_parser("sweep", parents=[common], help="Train and evaluate at several tweet counts")
    sweep.add_argument("--l-values", type=int, nargs="+", default=None, help="Numbers of most recent tweets kept")

    explain = subparsers.add_parser("explain", parents=[common], help="Export attention reports and word clouds")
    explain.add_argument("--checkpoint", required=True, help="Directory of the trained MDHAN model")
    explain.add_argument("--users", nargs="+", default=None, help="Ids of the users to explain, test users by default")
    explain.add_argument("--top-n", type=int, default=50, help="Tokens kept for each symptom word cloud")
    explain.add_argument("--rank-by", default="mentions", choices=["mentions", "tweets"],
                         help="Rule used to select the most influencing symptom categories")

    gradcheck = subparsers.add_parser("gradcheck", parents=[common], help="Finite difference gradient check")
    gradcheck.add_argument("--samples", type=int, default=10, help="Coordinates checked for each parameter")

    subparsers.add_parser("baseline-nb", parents=[common], help="Fit and evaluate the Naive Bayes baseline")

    return parser


def _set(section: dict, key: str, value):
    if value is not None:
        section[key] = value


def apply_overrides(yaml_args: dict, args: argparse.Namespace) -> dict:
    """
    Flags override the values of the configuration file, the result is parsed as if it came from the file
    """

    yaml_args = json.loads(json.dumps(yaml_args))

    data_section = yaml_args.setdefault("data", None)
    model_section = yaml_args.setdefault("model", None) or {}
    eval_section = yaml_args.setdefault("eval", None) or {}

    _set(yaml_args, "exp_name", args.exp_name)
    _set(yaml_args, "output_dir", args.output_dir)
    _set(yaml_args, "random_seed", args.seed)
    _set(model_section, "seed", args.seed)

    if args.command == "synth":
        data_section = data_section or {}
        synth_section = data_section.setdefault("synth", None) or {}

        _set(synth_section, "n_users", args.users)
        _set(synth_section, "signal", args.signal)
        _set(synth_section, "seed", args.seed)
        _set(synth_section, "channels", args.channels)
        _set(synth_section, "text_vocab", args.text_vocab)
        _set(synth_section, "split_families", args.split_families)
        _set(synth_section, "tweets_per_user", args.tweets_per_user)

        data_section["synth"] = synth_section

    if args.command == "ingest" and args.corpus is not None:
        data_section = data_section or {}
        data_section["corpus_path"] = args.corpus

    if args.command == "features" and args.embeddings is not None:
        data_section = data_section or {}
        data_section["embeddings_path"] = args.embeddings

    if args.command == "lda-fit" or args.seed is not None:
        if data_section is not None:
            lda_section = data_section.get("lda") or {}
            _set(lda_section, "seed", args.seed)
            if args.command == "lda-fit":
                _set(lda_section, "K", args.topics)
                _set(lda_section, "iterations", args.iterations)
            data_section["lda"] = lda_section

    if args.command == "train":
        _set(model_section, "model_cls_name", args.model)
        _set(model_section, "epochs", args.epochs)
        _set(model_section, "lr", args.lr)
        _set(model_section, "batch_size", args.batch_size)

    if args.command == "ablate":
        _set(eval_section, "ablations", args.ablations)
        _set(eval_section, "n_workers", args.workers)

    if args.command == "sweep":
        _set(eval_section, "sweep_l", args.l_values)

    yaml_args["data"] = data_section
    yaml_args["model"] = model_section
    yaml_args["eval"] = eval_section

    return yaml_args


def _plain(params) -> dict | None:
    # dataclass -> yaml friendly dict (tuples become lists)
    if params is None:
        return None
    return json.loads(json.dumps(dataclasses.asdict(params), default=str))


def pretty_print_configuration(config: dict):
    print(" Experiment configuration ".center(80, "*"))

    print("\n" + "-" * 80)
    print("Environment/General parameters:")
    print("-" * 80)

    env_var_keys = ("command", "PYTHONHASHSEED", "git_branch")
    env_var_dict = {key: config[key] for key in env_var_keys}

    print(yaml.dump({**env_var_dict, **config["general_params"]}, default_flow_style=False, Dumper=IndentedDumper))

    for section_title, section_key in (("Data", "data_params"), ("Model", "model_params"), ("Eval", "eval_params")):
        print("-" * 80)
        print(f"{section_title} parameters:")
        print("-" * 80)
        print(yaml.dump(config[section_key], default_flow_style=False, Dumper=IndentedDumper))


def dump_resolved_config(config: dict, output_dir: str):
    os.makedirs(output_dir, exist_ok=True)

    with open(os.path.join(output_dir, "resolved_config.yml"), "w") as f:
        yaml.dump(config, f, default_flow_style=False, sort_keys=True, Dumper=IndentedDumper)


def require_data(data_params: DataParams | None, command: str) -> DataParams:
    if data_params is None:
        raise ConfigError(f"The '{command}' command needs a 'data' section in the configuration!")
    return data_params


def run_command(args: argparse.Namespace,
                general_params: GeneralParams,
                data_params: DataParams | None,
                model_params: ModelConfig,
                eval_params: EvalParams):

    command = args.command

    match command:

        case "synth":
            synth_main(general_params, require_data(data_params, command))

        case "ingest":
            ingest_main(general_params, require_data(data_params, command))

        case "lda-fit":
            lda_fit_main(general_params, require_data(data_params, command))

        case "features":
            data_main(general_params, require_data(data_params, command))

        case "train":
            # the prepared dataset is built on the fly when the 'features' command wasn't run
            if not os.path.isfile(os.path.join(general_params.phase_dir("dataset"), "bluebird_dat.pkl")):
                print(" DATA ".center(80, "*"))
                data_main(general_params, require_data(data_params, command))
                print()

            print(" MODEL ".center(80, "*"))
            model_main(general_params, model_params)

        case "eval":
            print(" EVAL ".center(80, "*"))
            eval_main(general_params, model_params, eval_params, checkpoint_dir=args.checkpoint)

        case "ablate":
            ablate_main(general_params, model_params, eval_params)

        case "sweep":
            sweep_main(general_params, model_params, eval_params)

        case "explain":
            explain_params = ExplainParams(user_ids=args.users, wordcloud_top_n=args.top_n, rank_by=args.rank_by)
            explain_main(general_params, explain_params, checkpoint_dir=args.checkpoint)

        case "gradcheck":
            report = gradcheck_main(general_params, model_params, seed=general_params.random_seed,
                                    n_samples=args.samples)
            if not report.passed:
                raise ArithmeticError(f"gradient check failed, max relative error {report.max_rel_error:.3e} "
                                      f"on {report.worst_param}{list(report.worst_index or [])}")

        case "baseline-nb":
            baseline_nb_main(general_params, eval_params)


def main(argv: list[str] = None) -> int:

    args = build_parser().parse_args(argv)

    try:
        yaml_args = apply_overrides(load_yml_config(args.config), args)
        general_params, data_params, model_params, eval_params = parse_config(yaml_args)

        if general_params.log_wandb:

            if 'WANDB_API_KEY' not in os.environ:
                raise ConfigError('Cannot log run to wandb if environment variable "WANDB_API_KEY" is not present')

            if 'WANDB_ENTITY' not in os.environ:
                raise ConfigError('Cannot log run to wandb if environment variable "WANDB_ENTITY" is not present')

        # apart from the params read from yml file, log env variables needed for reproducibility and
        # also the current active branch (if the project is in a git directory)
        try:
            git_branch = Repository('.').head.shorthand
        except GitError:
            git_branch = None

        config_args = {
            "command": args.command,
            "general_params": _plain(general_params),
            "data_params": _plain(data_params),
            "model_params": _plain(model_params),
            "eval_params": _plain(eval_params),
            "PYTHONHASHSEED": os.environ.get("PYTHONHASHSEED"),
            "git_branch": git_branch
        }

        pretty_print_configuration(config_args)
        dump_resolved_config(config_args, general_params.phase_dir(COMMAND_PHASE[args.command]))

        seed_everything(general_params.random_seed)

        with init_wandb(project=general_params.wandb_project or "Bluebird", name=general_params.exp_name,
                        config=config_args, should_log=general_params.log_wandb):
            run_command(args, general_params, data_params, model_params, eval_params)

    except FileNotFoundError as e:
        fail("missing-file", e, EXIT_MISSING_FILE)
    except SchemaError as e:
        fail("schema", e, EXIT_SCHEMA)
    except TrainingDivergedError as e:
        fail("diverged", e, EXIT_DIVERGED)
    except Exception as e:
        fail(type(e).__name__, e, EXIT_OTHER)

    return EXIT_OK


if __name__ == '__main__':
    sys.exit(main())
