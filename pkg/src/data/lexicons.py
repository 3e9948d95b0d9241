from __future__ import annotations

import os
from collections import Counter
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
from loguru import logger

from src import SchemaError, ASSETS_DIR
from src.data.preprocess import tokenize


class LexiconFormatError(SchemaError):
    pass


SYMPTOM_CATEGORIES = (
    "depressed_mood",
    "diminished_interest",
    "weight_appetite_change",
    "sleep_disturbance",
    "psychomotor",
    "fatigue",
    "worthlessness_guilt",
    "diminished_concentration",
    "suicidal_ideation",
)

POLARITIES = ("positive", "neutral", "negative")

FIRST_PERSON_SINGULAR = frozenset({"i", "me", "my", "mine", "myself"})
FIRST_PERSON_PLURAL = frozenset({"we", "us", "our", "ours", "ourselves"})


def _check_file(path: str):
    if not os.path.isfile(path):
        raise FileNotFoundError(f"Lexicon file {path} not found!")


def _content_lines(path: str):
    # yields (line_number, stripped line) skipping blank lines and '#' comments
    with open(path, "r", encoding="utf-8") as f:
        for line_number, line in enumerate(f, start=1):
            stripped = line.strip()
            if stripped == "" or stripped.startswith("#"):
                continue
            yield line_number, stripped


def load_stopwords(path: str) -> frozenset[str]:
    _check_file(path)

    return frozenset(line.lower() for _, line in _content_lines(path))


class PhraseMatcher:
    """
    Counts occurrences of keyword phrases in a token list. Keywords are normalized with `tokenize()` so
    that they follow the same rules of the text they are matched against, multi-word keywords match
    contiguous token subsequences
    """

    def __init__(self, keywords: frozenset[str] | set[str]):
        phrases = {tuple(tokenize(keyword)) for keyword in keywords}
        phrases.discard(())

        self.unigrams = frozenset(phrase[0] for phrase in phrases if len(phrase) == 1)
        self.ngrams = tuple(sorted(phrase for phrase in phrases if len(phrase) > 1))

    def count(self, tokens: list[str]) -> int:
        n_matches = sum(1 for token in tokens if token in self.unigrams)

        for phrase in self.ngrams:
            phrase_len = len(phrase)
            n_matches += sum(1 for start in range(len(tokens) - phrase_len + 1)
                             if tuple(tokens[start:start + phrase_len]) == phrase)

        return n_matches

    def matches(self, tokens: list[str]) -> bool:
        return self.count(tokens) > 0


@dataclass
class EmbeddingTable:
    dimension: int
    tokens: list[str] = field(default_factory=list)
    vectors: np.ndarray = None

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError(f"Embedding dimension should be positive, got {self.dimension}")

        if self.vectors is None:
            self.vectors = np.zeros((0, self.dimension), dtype=np.float64)

        self.vectors = np.asarray(self.vectors, dtype=np.float64)
        if self.vectors.shape != (len(self.tokens), self.dimension):
            raise ValueError(f"Embedding vectors of shape {self.vectors.shape} don't match "
                             f"{len(self.tokens)} tokens of dimension {self.dimension}")

        self.token2idx = {token: idx for idx, token in enumerate(self.tokens)}

    def __len__(self):
        return len(self.tokens)

    def __contains__(self, token: str):
        return token in self.token2idx

    def lookup(self, token: str) -> np.ndarray:
        idx = self.token2idx.get(token)

        # unknown tokens are mapped to the all zeros UNK vector
        if idx is None:
            return np.zeros(self.dimension, dtype=np.float64)

        return self.vectors[idx].copy()

    def most_similar(self, token: str, k: int, tau: float) -> list[tuple[str, float]]:
        """
        The `k` tokens closest to `token` by cosine similarity with similarity >= tau, the token itself
        excluded. Ties are broken lexicographically. Unknown tokens have no neighbours
        """

        if k <= 0 or token not in self.token2idx:
            return []

        norms = np.linalg.norm(self.vectors, axis=1)
        query = self.vectors[self.token2idx[token]]
        query_norm = np.linalg.norm(query)

        if query_norm == 0:
            return []

        similarities = np.divide(self.vectors @ query, norms * query_norm,
                                 out=np.zeros(len(self.tokens)), where=norms != 0)

        # lexsort sorts by the last key first: descending similarity, then token
        order = np.lexsort((np.array(self.tokens, dtype=str), -similarities))

        neighbours = []
        for idx in order:
            if len(neighbours) == k or similarities[idx] < tau:
                break
            if self.tokens[idx] == token:
                continue
            neighbours.append((self.tokens[idx], float(similarities[idx])))

        return neighbours

    def save(self, path: str):
        os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)

        with open(path, "w", encoding="utf-8") as f:
            for token, vector in zip(self.tokens, self.vectors):
                f.write(token + " " + " ".join(repr(float(value)) for value in vector) + "\n")


def load_embeddings(path: str, dimension: int = 100) -> EmbeddingTable:

    _check_file(path)

    tokens = []
    vectors = []
    seen = set()
    with open(path, "r", encoding="utf-8") as f:
        for line_number, line in enumerate(f, start=1):
            parts = line.rstrip("\n").split()

            if len(parts) == 0:
                continue

            if len(parts) != dimension + 1:
                raise LexiconFormatError(f"{path}:{line_number}: expected a token followed by {dimension} "
                                         f"values, found {len(parts) - 1} values")

            token = parts[0]
            if token in seen:
                continue

            try:
                vector = [float(value) for value in parts[1:]]
            except ValueError:
                raise LexiconFormatError(f"{path}:{line_number}: non numeric embedding value") from None

            if not np.all(np.isfinite(vector)):
                raise LexiconFormatError(f"{path}:{line_number}: non finite embedding value")

            seen.add(token)
            tokens.append(token)
            vectors.append(vector)

    return EmbeddingTable(dimension=dimension, tokens=tokens,
                          vectors=np.array(vectors, dtype=np.float64).reshape(len(tokens), dimension))


@dataclass
class EmojiLexicon:
    polarity: dict[str, str]

    def __post_init__(self):
        if len(self.polarity) == 0:
            raise LexiconFormatError("Emoji lexicon can't be empty!")

        invalid = set(self.polarity.values()) - set(POLARITIES)
        if invalid:
            raise LexiconFormatError(f"Invalid emoji polarities {sorted(invalid)}, allowed are {POLARITIES}")

        self._max_len = max(len(emoji) for emoji in self.polarity)

    def count(self, text: str) -> tuple[int, int, int]:
        """
        Greedy longest-match scan over the raw text, returns (positive, neutral, negative) counts
        """

        counts = Counter()
        i = 0
        while i < len(text):
            for length in range(min(self._max_len, len(text) - i), 0, -1):
                polarity = self.polarity.get(text[i:i + length])
                if polarity is not None:
                    counts[polarity] += 1
                    i += length
                    break
            else:
                i += 1

        return counts["positive"], counts["neutral"], counts["negative"]


def load_emoji_lexicon(path: str) -> EmojiLexicon:

    _check_file(path)

    polarity = {}
    for line_number, line in _content_lines(path):
        parts = line.split("\t")

        if len(parts) < 2:
            raise LexiconFormatError(f"{path}:{line_number}: expected 'emoji<TAB>polarity[<TAB>name]'")

        emoji, emoji_polarity = parts[0].strip(), parts[1].strip().lower()
        if emoji_polarity not in POLARITIES:
            raise LexiconFormatError(f"{path}:{line_number}: invalid polarity '{emoji_polarity}'")

        polarity.setdefault(emoji, emoji_polarity)

    return EmojiLexicon(polarity)


@dataclass
class VadLexicon:
    norms: dict[str, tuple[float, float, float]]

    def __len__(self):
        return len(self.norms)

    def score(self, tokens: list[str]) -> np.ndarray:
        # sum of the (valence, arousal, dominance) tuples of the lexicon hits
        total = np.zeros(3, dtype=np.float64)
        for token in tokens:
            norm = self.norms.get(token)
            if norm is not None:
                total += norm

        return total


def load_vad_lexicon(path: str) -> VadLexicon:

    _check_file(path)

    # keep_default_na so that words such as "null" or "nan" are not parsed as missing values
    vad_df = pd.read_csv(path, keep_default_na=False, comment="#")

    expected_columns = ["word", "valence", "arousal", "dominance"]
    if list(vad_df.columns) != expected_columns:
        raise LexiconFormatError(f"{path}: expected header {','.join(expected_columns)}, "
                                 f"found {','.join(vad_df.columns)}")

    try:
        scores = vad_df[expected_columns[1:]].to_numpy(dtype=np.float64)
    except ValueError:
        raise LexiconFormatError(f"{path}: non numeric VAD score") from None

    if not np.all(np.isfinite(scores)):
        raise LexiconFormatError(f"{path}: non finite VAD score")

    norms = {}
    for word, score in zip(vad_df["word"], scores):
        norms.setdefault(str(word).lower(), tuple(float(value) for value in score))

    return VadLexicon(norms)


@dataclass
class SymptomLexicon:
    categories: dict[str, frozenset[str]]

    def __post_init__(self):
        if tuple(self.categories) != SYMPTOM_CATEGORIES:
            raise LexiconFormatError(f"Symptom lexicon should have exactly the categories {SYMPTOM_CATEGORIES} "
                                     f"in this order, found {tuple(self.categories)}")

        self.matchers = {category: PhraseMatcher(keywords) for category, keywords in self.categories.items()}

    def count(self, tokens: list[str]) -> np.ndarray:
        return np.array([self.matchers[category].count(tokens) for category in SYMPTOM_CATEGORIES],
                        dtype=np.float64)

    def all_keywords(self) -> frozenset[str]:
        return frozenset().union(*self.categories.values())


def load_symptom_lexicon(path: str) -> SymptomLexicon:

    _check_file(path)

    sections: dict[str, set[str]] = {}
    current = None
    for line_number, line in _content_lines(path):

        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].strip()
            if current not in SYMPTOM_CATEGORIES:
                raise LexiconFormatError(f"{path}:{line_number}: unknown symptom category '{current}'")
            if current in sections:
                raise LexiconFormatError(f"{path}:{line_number}: duplicate symptom category '{current}'")
            sections[current] = set()
            continue

        if current is None:
            raise LexiconFormatError(f"{path}:{line_number}: keyword found before any [category] header")

        sections[current].add(line.lower())

    missing = [category for category in SYMPTOM_CATEGORIES if category not in sections]
    if missing:
        raise LexiconFormatError(f"{path}: missing symptom categories {missing}")

    return SymptomLexicon({category: frozenset(sections[category]) for category in SYMPTOM_CATEGORIES})


def expand_symptom_lexicon(seeds: SymptomLexicon, emb: EmbeddingTable, k: int = 5, tau: float = 0.5) -> SymptomLexicon:

    if k < 0:
        raise ValueError(f"k should be >= 0, got {k}")
    if not -1 <= tau <= 1:
        raise ValueError(f"tau should be in [-1, 1], got {tau}")

    expanded = {}
    for category, keywords in seeds.categories.items():
        category_keywords = set(keywords)

        for seed in sorted(keywords):
            if seed not in emb:
                logger.debug(f"Seed '{seed}' of category {category} not in the embedding table, skipped")
                continue

            category_keywords.update(token for token, _ in emb.most_similar(seed, k, tau))

        expanded[category] = frozenset(category_keywords)

    return SymptomLexicon(expanded)


@dataclass
class AntidepressantLexicon:
    names: frozenset[str]

    def __post_init__(self):
        self.matcher = PhraseMatcher(self.names)

    def __contains__(self, name: str):
        return name.lower() in self.names

    def count(self, tokens: list[str]) -> int:
        return self.matcher.count(tokens)


def load_antidepressants(path: str) -> AntidepressantLexicon:
    _check_file(path)

    return AntidepressantLexicon(frozenset(line.lower() for _, line in _content_lines(path)))


@dataclass
class Lexicons:
    stopwords: frozenset[str]
    emoji: EmojiLexicon
    vad: VadLexicon
    symptoms: SymptomLexicon
    antidepressants: AntidepressantLexicon

    @classmethod
    def from_dir(cls, assets_dir: str = ASSETS_DIR,
                 embeddings: EmbeddingTable = None,
                 k: int = 5,
                 tau: float = 0.5) -> Lexicons:
        """
        Loads every shipped lexical resource from `assets_dir`. If an embedding table is passed, the
        symptom seeds are expanded with their nearest neighbours
        """

        symptoms = load_symptom_lexicon(os.path.join(assets_dir, "symptom_seeds.txt"))
        if embeddings is not None:
            symptoms = expand_symptom_lexicon(symptoms, embeddings, k=k, tau=tau)

        return cls(
            stopwords=load_stopwords(os.path.join(assets_dir, "stopwords.txt")),
            emoji=load_emoji_lexicon(os.path.join(assets_dir, "emoji_sentiment.tsv")),
            vad=load_vad_lexicon(os.path.join(assets_dir, "vad_norms.csv")),
            symptoms=symptoms,
            antidepressants=load_antidepressants(os.path.join(assets_dir, "antidepressants.txt"))
        )
