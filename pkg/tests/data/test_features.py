import os
import shutil
import unittest
from datetime import datetime, timezone

import numpy as np
import pandas as pd

from src.data.corpus import TweetRecord, UserRecord
from src.data.features import (LAYOUT, MODALITIES, ModalityLayout, FeatureVector, FeatureExtractor, social_features,
                               emotion_features, topic_features, domain_features, user_document, fit_norm,
                               apply_norm, export_csv)
from src.data.lexicons import (EmojiLexicon, VadLexicon, SymptomLexicon, AntidepressantLexicon, Lexicons,
                               SYMPTOM_CATEGORIES)
from src.data.topics import LdaConfig, fit_lda

TEXTS = ("I feel so tired @bob 😢", "we went out #fun", "started zoloft can't sleep")


def make_user() -> UserRecord:
    tweets = (
        TweetRecord(TEXTS[0], datetime(2021, 1, 1, 1, 10, tzinfo=timezone.utc)),
        TweetRecord(TEXTS[1], datetime(2021, 1, 2, 1, 45, tzinfo=timezone.utc), is_retweet=True),
        TweetRecord(TEXTS[2], datetime(2021, 1, 3, 13, 0, tzinfo=timezone.utc)),
    )

    return UserRecord(user_id="u1", label=1, followers=10, friends=20, favourites=30, listed=1, statuses=100,
                      tweets=tweets)


def make_lexicons() -> Lexicons:
    categories = {category: frozenset({f"{category}_kw"}) for category in SYMPTOM_CATEGORIES}
    categories["fatigue"] = frozenset({"tired"})
    categories["sleep_disturbance"] = frozenset({"can't sleep"})

    return Lexicons(stopwords=frozenset({"i", "so", "we", "out"}),
                    emoji=EmojiLexicon({"😢": "negative", "😀": "positive"}),
                    vad=VadLexicon({"tired": (3.0, 2.0, 4.0), "sleep": (6.0, 1.0, 5.0)}),
                    symptoms=SymptomLexicon(categories),
                    antidepressants=AntidepressantLexicon(frozenset({"zoloft"})))


class TestLayout(unittest.TestCase):

    def test_layout(self):
        self.assertEqual(LAYOUT.total, 76)
        self.assertEqual([LAYOUT.length(modality) for modality in MODALITIES], [33, 8, 25, 10])

        self.assertEqual(LAYOUT.slice("S"), slice(0, 33))
        self.assertEqual(LAYOUT.slice("E"), slice(33, 41))
        self.assertEqual(LAYOUT.slice("T"), slice(41, 66))
        self.assertEqual(LAYOUT.slice("D"), slice(66, 76))

        self.assertEqual(len(ModalityLayout.names()), 76)
        self.assertEqual(len(set(ModalityLayout.names())), 76)

        with self.assertRaises(KeyError):
            LAYOUT.slice("X")

    def test_mask_vector(self):
        mask = LAYOUT.mask_vector((True, False, False, True))

        self.assertEqual(mask.sum(), 43)
        self.assertTrue(np.all(mask[0:33] == 1))
        self.assertTrue(np.all(mask[33:66] == 0))
        self.assertTrue(np.all(mask[66:76] == 1))

        with self.assertRaises(ValueError):
            LAYOUT.mask_vector((True, True))

    def test_feature_vector(self):
        vector = FeatureVector(np.arange(76))
        np.testing.assert_array_equal(vector.modality("D"), np.arange(66, 76))

        with self.assertRaises(ValueError):
            FeatureVector(np.zeros(75))

        values = np.zeros(76)
        values[3] = np.nan
        with self.assertRaises(ValueError):
            FeatureVector(values)


class TestExtractors(unittest.TestCase):

    def test_social(self):
        social = social_features(make_user())

        self.assertEqual(len(social), 33)
        np.testing.assert_array_equal(social[:5], [10, 20, 30, 1, 100])
        np.testing.assert_array_equal(social[5:9], [3, sum(len(text) for text in TEXTS), 1, 1])

        hours = social[9:]
        self.assertEqual(hours.sum(), 3)
        self.assertEqual(hours[1], 2)
        self.assertEqual(hours[13], 1)

        with self.assertRaises(ValueError):
            social_features(UserRecord(user_id="empty", label=0))

    def test_emotion(self):
        lexicons = make_lexicons()

        emotion = emotion_features(make_user(), lexicons.emoji, lexicons.vad)

        # emoji (pos, neu, neg), vad sums, first person singular and plural
        np.testing.assert_array_equal(emotion, [0, 0, 1, 9.0, 3.0, 9.0, 1, 1])

    def test_domain(self):
        lexicons = make_lexicons()

        domain = domain_features(make_user(), lexicons.symptoms, lexicons.antidepressants)

        self.assertEqual(len(domain), 10)
        self.assertEqual(domain[SYMPTOM_CATEGORIES.index("fatigue")], 1)
        self.assertEqual(domain[SYMPTOM_CATEGORIES.index("sleep_disturbance")], 1)
        self.assertEqual(domain[:9].sum(), 2)
        self.assertEqual(domain[9], 1)

    def test_user_document(self):
        document = user_document(make_user(), make_lexicons().stopwords)

        self.assertEqual(document, ["feel", "tired", "went", "fun", "started", "zoloft", "can't", "sleep"])

    def test_topic_and_extractor(self):
        lexicons = make_lexicons()
        user = make_user()

        docs = [user_document(user, lexicons.stopwords), ["sad", "tired", "alone"], ["game", "team", "goal"]]
        lda_model = fit_lda(docs, LdaConfig(K=25, iterations=5, fold_in_sweeps=5))

        topics = topic_features(user, lda_model, lexicons.stopwords)
        self.assertEqual(len(topics), 25)
        self.assertAlmostEqual(topics.sum(), 1.0)

        vector = FeatureExtractor(lexicons, lda_model).extract(user)
        self.assertEqual(vector.values.shape, (76,))
        np.testing.assert_allclose(vector.modality("T"), topics)
        np.testing.assert_array_equal(vector.modality("S"), social_features(user))

        matrix = FeatureExtractor(lexicons, lda_model).extract_matrix([user, user])
        self.assertEqual(matrix.shape, (2, 76))
        self.assertEqual(FeatureExtractor(lexicons, lda_model).extract_matrix([]).shape, (0, 76))

        small_model = fit_lda(docs, LdaConfig(K=3, iterations=2))
        with self.assertRaises(ValueError):
            topic_features(user, small_model, lexicons.stopwords)


class TestNormalization(unittest.TestCase):

    def setUp(self) -> None:
        os.makedirs("to_del", exist_ok=True)

    def test_fit_apply(self):
        train = np.array([[1.0, 5.0], [3.0, 5.0]])

        stats = fit_norm(train)
        np.testing.assert_array_equal(stats.mean, [2.0, 5.0])
        self.assertEqual(stats.std[0], 1.0)

        # constant columns are floored instead of divided by zero
        self.assertGreater(stats.std[1], 0)
        np.testing.assert_array_equal(apply_norm(train, stats), [[-1.0, 0.0], [1.0, 0.0]])

        with self.assertRaises(ValueError):
            fit_norm(np.zeros((0, 2)))

    def test_apply_feature_vector(self):
        vectors = [FeatureVector(np.full(76, 2.0)), FeatureVector(np.full(76, 4.0))]

        stats = fit_norm(vectors)
        normalized = apply_norm(vectors[1], stats)

        self.assertIsInstance(normalized, FeatureVector)
        np.testing.assert_allclose(normalized.values, np.ones(76))

    def test_export_csv(self):
        matrix = np.arange(2 * 76, dtype=float).reshape(2, 76)

        export_csv(["a", "b"], matrix, "to_del/features.csv")

        features_df = pd.read_csv("to_del/features.csv", index_col="user_id")
        self.assertEqual(features_df.index.tolist(), ["a", "b"])
        self.assertEqual(list(features_df.columns), ModalityLayout.names())
        np.testing.assert_array_equal(features_df.to_numpy(), matrix)

    def tearDown(self) -> None:
        shutil.rmtree("to_del")


if __name__ == '__main__':
    unittest.main()
