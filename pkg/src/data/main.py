from __future__ import annotations

import os

from cytoolz import concat
from loguru import logger

from src import GeneralParams
from src.data import DataParams
from src.data.corpus import Corpus, SplitSpec, load_corpus, save_corpus, filter_users, split
from src.data.dataset import BluebirdDataset, fit_train_lda
from src.data.lexicons import EmbeddingTable, load_embeddings, load_stopwords, load_symptom_lexicon
from src.data.preprocess import tokenize
from src.data.synth import synth_corpus, synth_embeddings
from src.data.topics import LdaModel

CORPUS_FILE = "corpus.jsonl"
EMBEDDINGS_FILE = "embeddings.txt"
LDA_FILE = "lda.json"


def synth_main(general_params: GeneralParams, data_params: DataParams) -> Corpus:
    """
    Generates the synthetic corpus described by the `synth` sub-section, together with seeded embeddings
    for every token it contains (plus the symptom seed words, so that lexicon expansion has candidates)
    """

    synth_params = data_params.synth
    if synth_params is None:
        raise ValueError("The 'synth' command needs a 'synth' sub-section in the data section!")

    corpus = synth_corpus(n_users=synth_params.n_users,
                          signal=synth_params.signal,
                          seed=synth_params.seed,
                          channels=synth_params.channels,
                          text_vocab=synth_params.text_vocab,
                          split_families=synth_params.split_families,
                          tweets_per_user=synth_params.tweets_per_user,
                          tokens_per_tweet=synth_params.tokens_per_tweet,
                          assets_dir=data_params.assets_dir)

    seeds = load_symptom_lexicon(os.path.join(data_params.assets_dir, "symptom_seeds.txt"))
    vocab = set(concat(tokenize(tweet.text) for user in corpus for tweet in user.tweets))
    vocab.update(concat(tokenize(keyword) for keyword in seeds.all_keywords()))

    embeddings = synth_embeddings(sorted(vocab), dim=data_params.embedding_dim, seed=synth_params.seed)

    output_dir = general_params.phase_dir("corpus")
    save_corpus(corpus, os.path.join(output_dir, CORPUS_FILE))
    embeddings.save(os.path.join(output_dir, EMBEDDINGS_FILE))

    print(f"# Synthetic corpus with {len(corpus)} users saved into {os.path.join(output_dir, CORPUS_FILE)}")

    return corpus


def ingest_main(general_params: GeneralParams, data_params: DataParams) -> Corpus:
    """
    Validates the raw JSONL corpus, applies the user filters and writes the result in the canonical form
    """

    if data_params.corpus_path is None:
        raise ValueError("The 'ingest' command needs 'corpus_path' in the data section!")

    corpus = load_corpus(data_params.corpus_path)
    filtered = filter_users(corpus, min_posts=data_params.min_posts, max_followers=data_params.max_followers)

    logger.info(f"{len(filtered)} users out of {len(corpus)} kept after filtering")

    output_path = os.path.join(general_params.phase_dir("corpus"), CORPUS_FILE)
    save_corpus(filtered, output_path)

    print(f"# Corpus with {len(filtered)} users saved into {output_path}")

    return filtered


def load_splits(general_params: GeneralParams, data_params: DataParams) -> tuple[Corpus, Corpus]:
    corpus_path = os.path.join(general_params.phase_dir("corpus"), CORPUS_FILE)
    if not os.path.isfile(corpus_path):
        raise FileNotFoundError(f"Corpus {corpus_path} not found! Run the 'synth' or 'ingest' command first")

    corpus = filter_users(load_corpus(corpus_path),
                          min_posts=data_params.min_posts,
                          max_followers=data_params.max_followers)

    return split(corpus, SplitSpec(train_fraction=data_params.train_fraction, seed=general_params.random_seed))


def load_run_embeddings(general_params: GeneralParams, data_params: DataParams) -> EmbeddingTable:
    # explicit embeddings path has the precedence over the ones generated with the synthetic corpus
    embeddings_path = data_params.embeddings_path
    if embeddings_path is None:
        embeddings_path = os.path.join(general_params.phase_dir("corpus"), EMBEDDINGS_FILE)

    if not os.path.isfile(embeddings_path):
        raise FileNotFoundError(f"Embeddings file {embeddings_path} not found! Set 'embeddings_path' in the "
                                f"data section")

    return load_embeddings(embeddings_path, dimension=data_params.embedding_dim)


def lda_fit_main(general_params: GeneralParams, data_params: DataParams) -> LdaModel:

    train_corpus, _ = load_splits(general_params, data_params)
    stopwords = load_stopwords(os.path.join(data_params.assets_dir, "stopwords.txt"))

    lda_model = fit_train_lda(train_corpus, stopwords, data_params.lda)

    output_path = os.path.join(general_params.phase_dir("lda"), LDA_FILE)
    lda_model.save(output_path)

    print(f"# LDA model saved into {output_path}")

    return lda_model


def data_main(general_params: GeneralParams, data_params: DataParams) -> BluebirdDataset:
    """
    Builds the prepared dataset (splits, lexicons, LDA, features, normalization) and saves it together
    with the raw feature CSVs. An LDA model already fitted by the 'lda-fit' command is reused
    """

    train_corpus, test_corpus = load_splits(general_params, data_params)
    embeddings = load_run_embeddings(general_params, data_params)

    lda_model = None
    lda_path = os.path.join(general_params.phase_dir("lda"), LDA_FILE)
    if os.path.isfile(lda_path):
        logger.info(f"Reusing LDA model {lda_path}")
        lda_model = LdaModel.load(lda_path)

    ds = BluebirdDataset.build(train_corpus, test_corpus,
                               embeddings=embeddings,
                               lda_config=data_params.lda,
                               assets_dir=data_params.assets_dir,
                               expansion_k=data_params.expansion_k,
                               expansion_tau=data_params.expansion_tau,
                               lda_model=lda_model)

    output_dir = general_params.phase_dir("dataset")
    ds.save(output_dir)
    ds.export_features(output_dir)

    print(f"# Dataset with {len(ds.train_users)} train and {len(ds.test_users)} test users saved into {output_dir}")

    return ds
