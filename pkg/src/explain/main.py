from __future__ import annotations

import os

from src import GeneralParams
from src.data.corpus import Corpus
from src.data.dataset import BluebirdDataset
from src.explain import ExplainParams
from src.explain.attention import AttentionReport, extract_attention_batch
from src.explain.html_report import render_html
from src.explain.wordclouds import symptom_wordclouds, top_symptom_categories
from src.model.models.mdhan import MDHAN
from src.utils import dump_json


def explain_main(general_params: GeneralParams, explain_params: ExplainParams, checkpoint_dir: str) -> list[AttentionReport]:
    """
    Writes one JSON + HTML attention report per explained test user, the symptom word-cloud CSV of the
    whole corpus and the ranking of the most mentioned symptom categories
    """

    dataset_obj = BluebirdDataset.load(general_params.phase_dir("dataset"))
    model = MDHAN.load(checkpoint_dir)

    users = dataset_obj.test_users
    if explain_params.user_ids is not None:
        wanted = set(explain_params.user_ids)
        users = [user for user in dataset_obj.train_users + dataset_obj.test_users if user.user_id in wanted]

        missing = wanted - {user.user_id for user in users}
        if missing:
            raise KeyError(f"Users {sorted(missing)} do not exist in the prepared dataset!")

    output_dir = general_params.phase_dir("explain")
    os.makedirs(output_dir, exist_ok=True)

    reports = extract_attention_batch(model, users)
    for report in reports:
        with open(os.path.join(output_dir, f"{report.user_id}.json"), "w", encoding="utf-8") as f:
            f.write(report.to_json())
        with open(os.path.join(output_dir, f"{report.user_id}.html"), "w", encoding="utf-8") as f:
            f.write(render_html(report))

    print(f"# {len(reports)} attention reports saved into {output_dir}")

    corpus_users = list(dataset_obj.train_corpus) + list(dataset_obj.test_corpus)
    wordclouds = symptom_wordclouds(Corpus(corpus_users, name="all"),
                                    dataset_obj.lexicons.symptoms,
                                    dataset_obj.lexicons.stopwords,
                                    top_n=explain_params.wordcloud_top_n)
    wordclouds.save_csv(os.path.join(output_dir, "wordclouds.csv"))

    top_categories = top_symptom_categories(wordclouds, n=explain_params.top_symptoms, rank_by=explain_params.rank_by)
    dump_json({"rank_by": explain_params.rank_by,
               "categories": top_categories,
               "mentions": {category: wordclouds.mentions[category] for category in top_categories}},
              os.path.join(output_dir, "top_symptoms.json"))

    print(f"# Word-cloud data saved into {os.path.join(output_dir, 'wordclouds.csv')}")

    return reports
