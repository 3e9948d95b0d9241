from __future__ import annotations

import string

# max number of tokens kept for each tweet
N_MAX = 30

_URL_PREFIXES = ("http://", "https://", "www.")
_PUNCTUATION = string.punctuation


def _is_url(token: str) -> bool:
    return token.startswith(_URL_PREFIXES) or "://" in token


def _is_mention(token: str) -> bool:
    return token.startswith("@")


def _clean_token(raw_token: str) -> str:
    """
    Rule table applied to each whitespace-delimited token (already lowercased):

        * URL tokens (http://, https://, www., anything containing ://) are dropped
        * @mentions are dropped
        * leading '#' of hashtags is stripped, the tag word is kept
        * characters outside the printable ASCII range are deleted
        * leading/trailing punctuation is stripped

    An empty string is returned for tokens that should be dropped
    """

    if _is_url(raw_token) or _is_mention(raw_token):
        return ""

    token = raw_token.lstrip("#")
    token = "".join(char for char in token if "!" <= char <= "~")
    token = token.strip(_PUNCTUATION)

    # deleting characters could have revealed an url
    if _is_url(token):
        return ""

    return token


def tokenize(text: str) -> list[str]:
    """
    Lowercase and whitespace tokenization with the cleaning rules of `preprocess_tweet()`, but keeping
    stopwords and without truncation. Used by the lexicon based counters (first person pronouns, VAD, symptoms)
    """

    cleaned_tokens = (_clean_token(raw_token) for raw_token in text.lower().split())

    return [token for token in cleaned_tokens if token != ""]


def preprocess_tweet(text: str, stopwords: frozenset[str] | set[str], n_max: int | None = N_MAX) -> list[str]:

    tokens = [token for token in tokenize(text) if token not in stopwords]

    return tokens[:n_max]
