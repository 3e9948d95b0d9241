import unittest

from src import ConfigError
from src.model import ModelConfig


class TestModelConfig(unittest.TestCase):

    def test_defaults(self):
        config = ModelConfig()

        self.assertEqual(config.model_cls_name, "MDHAN")
        self.assertEqual((config.embed_dim, config.hidden, config.n_max, config.l_max), (100, 100, 30, 200))
        self.assertEqual(config.modality_mask, (True, True, True, True))
        self.assertIsNone(config.max_pool_words)

    def test_from_parse(self):
        config = ModelConfig.from_parse({"hidden": 8, "modality_mask": [1, 0, 1, 1], "model_cls_name": "naivebayes"})

        self.assertEqual(config.hidden, 8)
        self.assertEqual(config.modality_mask, (True, False, True, True))

        self.assertEqual(ModelConfig.from_parse(None), ModelConfig())

    def test_from_parse_errors(self):
        with self.assertRaises(ConfigError):
            ModelConfig.from_parse({"hiden": 8})

        with self.assertRaises(ConfigError):
            ModelConfig.from_parse({"model_cls_name": "svm"})

        with self.assertRaises(ConfigError):
            ModelConfig.from_parse({"hidden": 0})

        with self.assertRaises(ConfigError):
            ModelConfig.from_parse({"dropout": 1.0})

        with self.assertRaises(ConfigError):
            ModelConfig.from_parse({"modality_mask": [True, True]})

        with self.assertRaises(ConfigError):
            ModelConfig.from_parse({"use_tweets": False, "use_modalities": False})

        with self.assertRaises(ConfigError):
            ModelConfig.from_parse({"lr": 0})

    def test_replace_to_dict(self):
        config = ModelConfig().replace(hidden=4, modality_mask=(False, True, True, True))

        self.assertEqual(config.hidden, 4)

        config_dict = config.to_dict()
        self.assertEqual(config_dict["modality_mask"], [False, True, True, True])
        self.assertEqual(ModelConfig(**config_dict), config)

        with self.assertRaises(ConfigError):
            config.replace(batch_size=0)


if __name__ == '__main__':
    unittest.main()
