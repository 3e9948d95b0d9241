from dataclasses import dataclass

from src import ConfigError
from src.explain.wordclouds import RANK_RULES


@dataclass
class ExplainParams:
    # users to explain, all the test users when None
    user_ids: list[str] = None
    wordcloud_top_n: int = 50
    top_symptoms: int = 5
    rank_by: str = "mentions"

    def __post_init__(self):
        if self.rank_by not in RANK_RULES:
            raise ConfigError(f"rank_by should be one of {RANK_RULES}, got {self.rank_by}")
        if self.wordcloud_top_n < 1 or self.top_symptoms < 1:
            raise ConfigError("wordcloud_top_n and top_symptoms should be >= 1")
