from __future__ import annotations

import os
import pickle
from collections import Counter
from dataclasses import dataclass

import numpy as np
from cytoolz import concat

from src.data.dataset import PreparedUser
from src.model.abstract_model import BluebirdModel


@dataclass
class NaiveBayesParams:
    vocab: list[str]
    log_priors: np.ndarray
    # (2, |V|) log p(token | class) with add-one smoothing
    log_likelihoods: np.ndarray

    def __post_init__(self):
        self.token2idx = {token: idx for idx, token in enumerate(self.vocab)}


def nb_train(documents: list[list[str]], labels: list[int]) -> NaiveBayesParams:
    """
    Multinomial Naive Bayes with Laplace smoothing, one document per user
    """

    labels = np.asarray(labels, dtype=int)
    if set(labels.tolist()) != {0, 1}:
        raise ValueError("Naive Bayes needs train users of both classes")

    vocab = sorted(set(concat(documents)))
    token2idx = {token: idx for idx, token in enumerate(vocab)}

    counts = np.zeros((2, len(vocab)), dtype=np.float64)
    for doc, label in zip(documents, labels):
        for token, count in Counter(doc).items():
            counts[label, token2idx[token]] += count

    log_priors = np.log(np.bincount(labels, minlength=2) / len(labels))
    log_likelihoods = np.log((counts + 1) / (counts.sum(axis=1, keepdims=True) + len(vocab)))

    return NaiveBayesParams(vocab, log_priors, log_likelihoods)


def nb_scores(params: NaiveBayesParams, document: list[str]) -> np.ndarray:
    # tokens never seen at train time are ignored
    indices = [params.token2idx[token] for token in document if token in params.token2idx]

    return params.log_priors + params.log_likelihoods[:, indices].sum(axis=1)


def nb_predict(params: NaiveBayesParams, document: list[str]) -> int:
    # ties go to the negative class
    score_0, score_1 = nb_scores(params, document)
    return int(score_1 > score_0)


def user_tokens(user: PreparedUser) -> list[str]:
    return list(concat(user.tweet_tokens))


class NaiveBayes(BluebirdModel):

    def __init__(self, params: NaiveBayesParams = None):
        self.params = params

    def fit(self, users: list[PreparedUser]) -> NaiveBayes:
        self.params = nb_train([user_tokens(user) for user in users], [user.label for user in users])
        return self

    def _check_fitted(self):
        if self.params is None:
            raise ValueError("NaiveBayes model should be fit before predicting!")

    def predict_proba(self, users: list[PreparedUser]) -> np.ndarray:
        self._check_fitted()

        probas = []
        for user in users:
            scores = nb_scores(self.params, user_tokens(user))
            probas.append(np.exp(scores[1] - np.logaddexp(scores[0], scores[1])))

        return np.array(probas, dtype=np.float64)

    def predict(self, users: list[PreparedUser]) -> np.ndarray:
        self._check_fitted()

        # strict comparison of the class scores, a 0.5 posterior is a negative prediction
        return np.array([nb_predict(self.params, user_tokens(user)) for user in users], dtype=int)

    def save(self, output_dir: str):
        os.makedirs(output_dir, exist_ok=True)

        with open(os.path.join(output_dir, "naive_bayes.pkl"), "wb") as f:
            pickle.dump(self.params, f)

    @classmethod
    def load(cls, dir_path: str) -> NaiveBayes:
        model_path = os.path.join(dir_path, "naive_bayes.pkl")
        if not os.path.isfile(model_path):
            raise FileNotFoundError(f"Naive Bayes model {model_path} not found!")

        with open(model_path, "rb") as f:
            return cls(pickle.load(f))
