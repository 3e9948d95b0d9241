from __future__ import annotations

import os

import numpy as np
from cytoolz import concat

from src import GeneralParams
from src.autodiff import GradCheckReport, grad_check
from src.data.dataset import BluebirdDataset, PreparedUser
from src.data.features import LAYOUT
from src.data.preprocess import tokenize
from src.data.synth import synth_corpus, synth_embeddings
from src.model import ModelConfig, BluebirdModel
from src.model.models.mdhan import MDHAN
from src.model.models.naive_bayes import NaiveBayes
from src.model.trainer import MDHANTrainer
from src.utils import make_rng, dump_json


def model_main(general_params: GeneralParams, model_config: ModelConfig) -> BluebirdModel:
    """
    Trains the model named in the model section on the train users of the prepared dataset and saves it
    into the 'model' directory of the experiment
    """

    dataset_obj = BluebirdDataset.load(general_params.phase_dir("dataset"))
    output_dir = general_params.phase_dir("model")

    model_cls = BluebirdModel.model_exists(model_config.model_cls_name, return_bool=False)

    if model_cls is NaiveBayes:
        model = NaiveBayes().fit(dataset_obj.train_users)
        model.save(output_dir)

        print(f"# Naive Bayes fitted on {len(dataset_obj.train_users)} users, saved into {output_dir}")
        return model

    model = MDHAN.from_config(model_config, dataset_obj.embedding_matrix)

    trainer = MDHANTrainer(model, output_dir=output_dir, should_log=general_params.log_wandb)
    trainer.train(dataset_obj.train_users)

    return model


def gradcheck_users(config: ModelConfig, seed: int, n_users: int = 2,
                    tweets_per_user: int = 3) -> tuple[list[PreparedUser], np.ndarray]:
    """
    Small synthetic batch for gradient checking: tweets from the synthetic generator, seeded embeddings
    for their tokens and standard normal features
    """

    corpus = synth_corpus(n_users, signal=1.0, seed=seed, tweets_per_user=tweets_per_user)

    tweet_tokens = [[tokenize(tweet.text)[:config.n_max] for tweet in user.tweets] for user in corpus]
    vocab = sorted(set(concat(concat(tweet_tokens))))
    embeddings = synth_embeddings(vocab, dim=config.embed_dim, seed=seed)
    token2id = {token: idx for idx, token in enumerate(embeddings.tokens, start=1)}

    rng = make_rng(seed, 6)

    users = []
    for user, tokens in zip(corpus, tweet_tokens):
        features = rng.normal(size=LAYOUT.total)
        users.append(PreparedUser(user_id=user.user_id,
                                  label=user.label,
                                  tweet_texts=[tweet.text for tweet in user.tweets],
                                  tweet_tokens=tokens,
                                  token_ids=[[token2id[token] for token in tweet] for tweet in tokens],
                                  features=features,
                                  raw_features=features))

    return users, np.vstack([np.zeros((1, config.embed_dim)), embeddings.vectors])


def gradcheck_main(general_params: GeneralParams, model_config: ModelConfig, seed: int,
                   n_samples: int = 10) -> GradCheckReport:
    """
    Compares the tape gradients of the full model loss (dropout off) with central finite differences
    on a 2-user synthetic batch
    """

    config = model_config.replace(seed=seed)
    users, embedding_matrix = gradcheck_users(config, seed)

    model = MDHAN.from_config(config, embedding_matrix)
    batch = model.make_batch(users)

    def closure():
        return model.loss(model.forward(batch, train=False), batch)

    report = grad_check(closure, model.params.trainable(), n_samples=n_samples, seed=seed)

    output_path = os.path.join(general_params.phase_dir("gradcheck"), "gradcheck.json")
    dump_json(report.to_dict(), output_path)

    print(f"# Max relative error {report.max_rel_error:.3e} over {report.n_checked} coordinates "
          f"({'passed' if report.passed else 'FAILED'}), report saved into {output_path}")

    return report
