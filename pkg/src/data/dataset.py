from __future__ import annotations

import os
import pickle
from dataclasses import dataclass

import numpy as np
from loguru import logger

from src.data.corpus import Corpus, UserRecord
from src.data.features import (FeatureExtractor, NormStats, LAYOUT, fit_norm, apply_norm, export_csv,
                               user_document)
from src.data.lexicons import Lexicons, EmbeddingTable
from src.data.preprocess import preprocess_tweet, N_MAX
from src.data.topics import LdaModel, LdaConfig, fit_lda
from src.utils import PrintWithSpin


def fit_train_lda(train_corpus: Corpus, stopwords: frozenset[str], lda_config: LdaConfig) -> LdaModel:
    # one document per train user, both classes
    docs = [user_document(user, stopwords) for user in train_corpus.users]
    logger.info(f"Fitting LDA with K={lda_config.K} on {len(docs)} train documents")

    return fit_lda(docs, lda_config)


@dataclass
class PreparedUser:
    """
    Model-ready view of a user: preprocessed tweets (tokens and embedding row indices, 0 = UNK),
    raw tweet texts and the normalized 76-dimensional feature vector
    """

    user_id: str
    label: int
    tweet_texts: list[str]
    tweet_tokens: list[list[str]]
    token_ids: list[list[int]]
    features: np.ndarray
    raw_features: np.ndarray

    def truncated(self, max_tweets: int) -> PreparedUser:
        # most recent max_tweets tweets with at least one token left after preprocessing,
        # tweets are ordered by ascending timestamp
        kept = [idx for idx, ids in enumerate(self.token_ids) if len(ids) > 0]
        kept = kept[max(len(kept) - max_tweets, 0):]

        return PreparedUser(user_id=self.user_id,
                            label=self.label,
                            tweet_texts=[self.tweet_texts[idx] for idx in kept],
                            tweet_tokens=[self.tweet_tokens[idx] for idx in kept],
                            token_ids=[self.token_ids[idx] for idx in kept],
                            features=self.features,
                            raw_features=self.raw_features)


class BluebirdDataset:

    def __init__(self,
                 train_corpus: Corpus,
                 test_corpus: Corpus,
                 lexicons: Lexicons,
                 embeddings: EmbeddingTable,
                 lda_model: LdaModel,
                 n_max: int = N_MAX):

        self.train_corpus = train_corpus
        self.test_corpus = test_corpus
        self.lexicons = lexicons
        self.lda_model = lda_model
        self.n_max = n_max

        self.extractor = FeatureExtractor(lexicons, lda_model)

        # row 0 of the embedding matrix is the all zeros UNK vector
        self.vocab = list(embeddings.tokens)
        self.token2id = {token: idx for idx, token in enumerate(self.vocab, start=1)}
        self.embedding_matrix = np.vstack([np.zeros((1, embeddings.dimension)), embeddings.vectors])

        with PrintWithSpin("Extracting multi-modal features"):
            self.train_raw_features = self.extractor.extract_matrix(train_corpus.users)
            self.test_raw_features = self.extractor.extract_matrix(test_corpus.users)

        self.norm_stats: NormStats = fit_norm(self.train_raw_features)

        self.train_users = [self._prepare(user, raw) for user, raw in zip(train_corpus.users,
                                                                          self.train_raw_features)]
        self.test_users = [self._prepare(user, raw) for user, raw in zip(test_corpus.users,
                                                                         self.test_raw_features)]

    @classmethod
    def build(cls,
              train_corpus: Corpus,
              test_corpus: Corpus,
              embeddings: EmbeddingTable,
              lda_config: LdaConfig,
              assets_dir: str,
              expansion_k: int = 5,
              expansion_tau: float = 0.5,
              n_max: int = N_MAX,
              lda_model: LdaModel = None) -> BluebirdDataset:
        """
        Loads the lexicons (expanding the symptom seeds with `embeddings`), fits the topic model on the
        documents of the train users of both classes (unless an already fitted `lda_model` is passed)
        and extracts the features of both splits
        """

        with PrintWithSpin("Loading lexicons"):
            lexicons = Lexicons.from_dir(assets_dir, embeddings=embeddings, k=expansion_k, tau=expansion_tau)

        if lda_model is None:
            lda_model = fit_train_lda(train_corpus, lexicons.stopwords, lda_config)

        return cls(train_corpus, test_corpus, lexicons, embeddings, lda_model, n_max=n_max)

    def _prepare(self, user: UserRecord, raw_features: np.ndarray) -> PreparedUser:

        tweet_tokens = [preprocess_tweet(tweet.text, self.lexicons.stopwords, self.n_max) for tweet in user.tweets]
        token_ids = [[self.token2id.get(token, 0) for token in tokens] for tokens in tweet_tokens]

        return PreparedUser(user_id=user.user_id,
                            label=user.label,
                            tweet_texts=[tweet.text for tweet in user.tweets],
                            tweet_tokens=tweet_tokens,
                            token_ids=token_ids,
                            features=apply_norm(raw_features, self.norm_stats),
                            raw_features=raw_features)

    def prepare(self, user: UserRecord) -> PreparedUser:
        return self._prepare(user, self.extractor.extract(user).values)

    def export_features(self, output_dir: str):
        export_csv([user.user_id for user in self.train_corpus], self.train_raw_features,
                   os.path.join(output_dir, "features_train.csv"))
        export_csv([user.user_id for user in self.test_corpus], self.test_raw_features,
                   os.path.join(output_dir, "features_test.csv"))

    @property
    def n_features(self) -> int:
        return LAYOUT.total

    def save(self, output_dir: str):

        os.makedirs(output_dir, exist_ok=True)

        output_path = os.path.join(output_dir, "bluebird_dat.pkl")
        with open(output_path, "wb") as f:
            pickle.dump(self, f)

    @classmethod
    def load(cls, dir_path: str) -> BluebirdDataset:

        dat_path = os.path.join(dir_path, "bluebird_dat.pkl")
        if not os.path.isfile(dat_path):
            raise FileNotFoundError(f"Prepared dataset {dat_path} not found! Run the 'features' command first")

        with open(dat_path, "rb") as f:
            obj = pickle.load(f)

        return obj
