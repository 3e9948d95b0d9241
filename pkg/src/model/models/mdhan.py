from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from src.autodiff import tensor as ad
from src.autodiff.checkpoint import save_checkpoint, load_checkpoint
from src.autodiff.tensor import Tensor, ShapeError
from src.data.dataset import PreparedUser
from src.data.features import LAYOUT
from src.model import ModelConfig
from src.model.abstract_model import BluebirdModel
from src.utils import make_rng

GRU_GATES = ("z", "r", "h")


@dataclass
class Batch:
    """
    Padded batch of users: token ids of shape (users, tweets, words) with 0 as padding/UNK row,
    word and tweet masks (1 = real position) and the normalized multi-modal features
    """

    user_ids: list[str]
    token_ids: np.ndarray
    word_mask: np.ndarray
    tweet_mask: np.ndarray
    features: np.ndarray
    labels: np.ndarray

    def __len__(self):
        return len(self.user_ids)

    @classmethod
    def from_users(cls, users: list[PreparedUser], n_max: int, l_max: int, use_tweets: bool = True) -> Batch:

        if len(users) == 0:
            raise ValueError("Can't build a batch without users!")

        # most recent l_max tweets, each one truncated to n_max tokens
        tweets_per_user = [[ids[:n_max] for ids in user.truncated(l_max).token_ids] for user in users]

        if use_tweets:
            for user, tweets in zip(users, tweets_per_user):
                if not any(len(ids) > 0 for ids in tweets):
                    raise ValueError(f"User {user.user_id} has no non-empty tweet to encode")

        n_tweets = max(max((len(tweets) for tweets in tweets_per_user), default=1), 1)
        n_words = max(max((len(ids) for tweets in tweets_per_user for ids in tweets), default=1), 1)

        token_ids = np.zeros((len(users), n_tweets, n_words), dtype=np.int64)
        word_mask = np.zeros((len(users), n_tweets, n_words), dtype=np.float64)
        for user_idx, tweets in enumerate(tweets_per_user):
            for tweet_idx, ids in enumerate(tweets):
                token_ids[user_idx, tweet_idx, :len(ids)] = ids
                word_mask[user_idx, tweet_idx, :len(ids)] = 1.0

        # empty tweets are masked at tweet level
        tweet_mask = (word_mask.sum(axis=2) > 0).astype(np.float64)

        return cls(user_ids=[user.user_id for user in users],
                   token_ids=token_ids,
                   word_mask=word_mask,
                   tweet_mask=tweet_mask,
                   features=np.stack([user.features for user in users]).astype(np.float64),
                   labels=np.array([user.label for user in users], dtype=np.float64))


class ModelParams:
    """
    Frozen embedding table plus every trainable tensor of the network, addressed by name:

        word_gru_{fwd,bwd}.{W,U,b}_{z,r,h}, word_attn.{W,b,u},
        tweet_gru_{fwd,bwd}.{W,U,b}_{z,r,h}, tweet_attn.{W,b,u},
        mlp.{W,b}, fusion.{W,b}
    """

    def __init__(self, embedding: np.ndarray, trainable: dict[str, np.ndarray]):
        self.embedding = Tensor(embedding, requires_grad=False, name="embedding")
        self.tensors = {name: Tensor(values, requires_grad=True, name=name)
                        for name, values in sorted(trainable.items())}

    def __getitem__(self, name: str) -> Tensor:
        return self.tensors[name]

    def __contains__(self, name: str):
        return name in self.tensors

    def trainable(self) -> dict[str, Tensor]:
        return self.tensors

    def gru_weights(self, prefix: str) -> dict[str, Tensor]:
        return {name.split(".")[1]: tensor for name, tensor in self.tensors.items() if name.startswith(prefix + ".")}

    def to_arrays(self) -> dict[str, np.ndarray]:
        arrays = {name: tensor.numpy() for name, tensor in self.tensors.items()}
        arrays["embedding"] = self.embedding.numpy()
        return arrays

    @staticmethod
    def shapes(config: ModelConfig, n_features: int = LAYOUT.total) -> dict[str, tuple[int, ...]]:
        hidden = config.hidden
        shapes = {}

        def add_gru(prefix: str, input_dim: int):
            for gate in GRU_GATES:
                shapes[f"{prefix}.W_{gate}"] = (input_dim, hidden)
                shapes[f"{prefix}.U_{gate}"] = (hidden, hidden)
                shapes[f"{prefix}.b_{gate}"] = (hidden,)

        fusion_dim = 0
        if config.use_tweets:
            add_gru("word_gru_fwd", config.embed_dim)
            add_gru("word_gru_bwd", config.embed_dim)
            shapes["word_attn.W"] = (2 * hidden, 2 * hidden)
            shapes["word_attn.b"] = (2 * hidden,)
            shapes["word_attn.u"] = (2 * hidden,)

            add_gru("tweet_gru_fwd", 2 * hidden)
            add_gru("tweet_gru_bwd", 2 * hidden)
            shapes["tweet_attn.W"] = (2 * hidden, 2 * hidden)
            shapes["tweet_attn.b"] = (2 * hidden,)
            shapes["tweet_attn.u"] = (2 * hidden,)
            fusion_dim += 2 * hidden

        if config.use_modalities:
            shapes["mlp.W"] = (n_features, config.mlp_hidden)
            shapes["mlp.b"] = (config.mlp_hidden,)
            fusion_dim += config.mlp_hidden

        shapes["fusion.W"] = (fusion_dim,)
        shapes["fusion.b"] = (1,)

        return shapes

    @classmethod
    def init(cls, config: ModelConfig, embedding: np.ndarray, seed: int) -> ModelParams:
        """
        Glorot uniform for weight matrices (the fusion vector counts as a single output column),
        zeros for biases, uniform(-0.1, 0.1) for the attention context vectors
        """

        if embedding.shape[1] != config.embed_dim:
            raise ShapeError(f"Embedding matrix {embedding.shape} doesn't match embed_dim={config.embed_dim}")

        rng = make_rng(seed, 1)

        trainable = {}
        for name, shape in sorted(cls.shapes(config).items()):
            leaf = name.split(".")[1]

            if leaf == "u":
                trainable[name] = rng.uniform(-0.1, 0.1, size=shape)
            elif leaf.startswith("b"):
                trainable[name] = np.zeros(shape)
            else:
                fan_in, fan_out = (shape[0], shape[1]) if len(shape) == 2 else (shape[0], 1)
                limit = np.sqrt(6 / (fan_in + fan_out))
                trainable[name] = rng.uniform(-limit, limit, size=shape)

        return cls(embedding, trainable)


@dataclass
class ForwardOutput:
    y_hat: Tensor
    logit: Tensor
    s: Tensor | None
    p: Tensor | None

    # word weights (users, tweets, words) and tweet weights (users, tweets), zeros on padding
    word_alpha: np.ndarray | None
    tweet_alpha: np.ndarray | None


def gru_cell(x: Tensor, h_prev: Tensor, weights: dict[str, Tensor]) -> Tensor:
    """
    z = sigmoid(x W_z + h U_z + b_z)
    r = sigmoid(x W_r + h U_r + b_r)
    h~ = tanh(x W_h + (r * h) U_h + b_h)
    h' = (1 - z) * h + z * h~
    """

    if x.shape[-1] != weights["W_z"].shape[0] or h_prev.shape[-1] != weights["U_z"].shape[0]:
        raise ShapeError(f"gru_cell: input {x.shape} and state {h_prev.shape} don't match weights "
                         f"{weights['W_z'].shape} and {weights['U_z'].shape}")

    z = ad.sigmoid(x @ weights["W_z"] + h_prev @ weights["U_z"] + weights["b_z"])
    r = ad.sigmoid(x @ weights["W_r"] + h_prev @ weights["U_r"] + weights["b_r"])
    h_tilde = ad.tanh(x @ weights["W_h"] + ad.mul(r, h_prev) @ weights["U_h"] + weights["b_h"])

    return h_prev + ad.mul(z, h_tilde - h_prev)


def bigru(x: Tensor, mask: np.ndarray, weights_fwd: dict[str, Tensor], weights_bwd: dict[str, Tensor]) -> Tensor:
    """
    Bidirectional GRU over axis 1 of `x` (sequences, steps, features). Masked steps leave the state
    untouched, so padding never leaks into the states of real positions. Returns (sequences, steps, 2H)
    """

    n_sequences, n_steps = mask.shape
    hidden = weights_fwd["U_z"].shape[0]

    def run(weights: dict[str, Tensor], steps: range) -> list[Tensor]:
        h = Tensor(np.zeros((n_sequences, hidden)))
        states = [None] * n_steps
        for t in steps:
            h_new = gru_cell(ad.take(x, t, axis=1), h, weights)
            h = h + ad.mul(mask[:, t:t + 1], h_new - h)
            states[t] = h
        return states

    forward_states = run(weights_fwd, range(n_steps))
    backward_states = run(weights_bwd, range(n_steps - 1, -1, -1))

    return ad.concat([ad.stack(forward_states, axis=1), ad.stack(backward_states, axis=1)], axis=-1)


def attend(states: Tensor, mask: np.ndarray, W: Tensor, b: Tensor, u: Tensor) -> tuple[Tensor, Tensor]:
    """
    u_i = tanh(h_i W + b), alpha = masked softmax of u_i . u, v = sum_i alpha_i h_i.
    A sequence without valid positions gets all zero weights and a zero vector
    """

    scores = ad.tanh(states @ W + b) @ u
    alpha = ad.softmax(scores, mask=mask)

    n_sequences, n_steps = mask.shape
    weighted = ad.mul(states, ad.reshape(alpha, (n_sequences, n_steps, 1)))

    return ad.sum(weighted, axis=1), alpha


def encode_words(token_ids: np.ndarray, word_mask: np.ndarray, params: ModelParams,
                 max_pool_words: int = None) -> tuple[Tensor, np.ndarray, np.ndarray]:
    """
    Word level encoder for a flat batch of tweets (tweets, words). Returns the tweet vectors, the word
    weights and the mask the weights refer to (pooled windows when max pooling is enabled)
    """

    embedded = ad.embedding_lookup(params.embedding, token_ids)
    states = bigru(embedded, word_mask, params.gru_weights("word_gru_fwd"), params.gru_weights("word_gru_bwd"))

    if max_pool_words is not None:
        states, word_mask = ad.max_pool1d(states, word_mask, max_pool_words)
        word_mask = word_mask.astype(np.float64)

    v, alpha = attend(states, word_mask, params["word_attn.W"], params["word_attn.b"], params["word_attn.u"])

    return v, alpha.values, word_mask


def encode_tweet(token_ids: list[int], params: ModelParams, max_pool_words: int = None) -> tuple[Tensor, np.ndarray]:
    """
    Single tweet encoding: (v, word weights). An empty tweet gives a zero vector and no weights
    """

    hidden2 = params["word_attn.u"].shape[0]
    if len(token_ids) == 0:
        return Tensor(np.zeros(hidden2)), np.zeros(0)

    ids = np.array([token_ids], dtype=np.int64)
    mask = np.ones(ids.shape)
    v, alpha, _ = encode_words(ids, mask, params, max_pool_words)

    return ad.reshape(v, (hidden2,)), alpha[0]


def encode_user_tweets(tweet_vectors: Tensor, tweet_mask: np.ndarray, params: ModelParams) -> tuple[Tensor, Tensor]:
    """
    Tweet level encoder over (users, tweets, 2H) tweet vectors, exactly parallel to the word level
    """

    states = bigru(tweet_vectors, tweet_mask, params.gru_weights("tweet_gru_fwd"), params.gru_weights("tweet_gru_bwd"))

    return attend(states, tweet_mask, params["tweet_attn.W"], params["tweet_attn.b"], params["tweet_attn.u"])


def encode_modalities(features: np.ndarray | Tensor, params: ModelParams, modality_mask: tuple[bool, ...]) -> Tensor:
    """
    p = relu((f * mask) W + b), disabled modality slices are zeroed
    """

    features = features if isinstance(features, Tensor) else Tensor(features)
    if features.shape[-1] != LAYOUT.total:
        raise ShapeError(f"encode_modalities: expected {LAYOUT.total} features, got shape {features.shape}")

    masked = ad.mul(features, LAYOUT.mask_vector(modality_mask))

    return ad.relu(masked @ params["mlp.W"] + params["mlp.b"])


def predict(fusion_input: Tensor, params: ModelParams) -> tuple[Tensor, Tensor]:
    """
    y_hat = sigmoid([p ; s] . W_f + b_f), returns (y_hat, logit)
    """

    logit = fusion_input @ params["fusion.W"] + params["fusion.b"]
    return ad.sigmoid(logit), logit


def loss(y_hat: Tensor, labels: np.ndarray) -> Tensor:
    return ad.binary_cross_entropy(y_hat, labels)


class MDHAN(BluebirdModel):

    def __init__(self, config: ModelConfig, params: ModelParams):
        self.config = config
        self.params = params

    @classmethod
    def from_config(cls, config: ModelConfig, embedding_matrix: np.ndarray) -> MDHAN:
        return cls(config, ModelParams.init(config, embedding_matrix, config.seed))

    def make_batch(self, users: list[PreparedUser]) -> Batch:
        return Batch.from_users(users, self.config.n_max, self.config.l_max, use_tweets=self.config.use_tweets)

    def forward(self, batch: Batch, train: bool = False, rng: np.random.Generator = None) -> ForwardOutput:

        cfg = self.config
        n_users, n_tweets, n_words = batch.token_ids.shape

        fusion_parts = []
        p = s = None
        word_alpha = tweet_alpha = None

        if cfg.use_modalities:
            p = encode_modalities(batch.features, self.params, cfg.modality_mask)
            fusion_parts.append(ad.dropout(p, cfg.dropout, train, rng))

        if cfg.use_tweets:
            flat_ids = batch.token_ids.reshape(n_users * n_tweets, n_words)
            flat_mask = batch.word_mask.reshape(n_users * n_tweets, n_words)

            v, flat_word_alpha, alpha_mask = encode_words(flat_ids, flat_mask, self.params, cfg.max_pool_words)
            v = ad.reshape(v, (n_users, n_tweets, v.shape[-1]))

            s, tweet_alpha_tensor = encode_user_tweets(v, batch.tweet_mask, self.params)
            fusion_parts.append(ad.dropout(s, cfg.dropout, train, rng))

            word_alpha = flat_word_alpha.reshape(n_users, n_tweets, alpha_mask.shape[-1])
            tweet_alpha = tweet_alpha_tensor.values

        y_hat, logit = predict(ad.concat(fusion_parts, axis=-1), self.params)

        return ForwardOutput(y_hat=y_hat, logit=logit, s=s, p=p, word_alpha=word_alpha, tweet_alpha=tweet_alpha)

    def loss(self, output: ForwardOutput, batch: Batch) -> Tensor:
        return loss(output.y_hat, batch.labels)

    def classify(self, users: list[PreparedUser]) -> list[ForwardOutput]:
        # dropout free forward passes, one output per batch of users
        outputs = []
        for start in range(0, len(users), self.config.batch_size):
            batch = self.make_batch(users[start:start + self.config.batch_size])
            outputs.append(self.forward(batch, train=False))

        return outputs

    def predict_proba(self, users: list[PreparedUser]) -> np.ndarray:
        if len(users) == 0:
            return np.zeros(0)

        return np.concatenate([output.y_hat.values for output in self.classify(users)])

    def save(self, output_dir: str):
        save_checkpoint(output_dir,
                        tensors=self.params.to_arrays(),
                        config=self.config.to_dict(),
                        metadata={"model": self.__class__.__name__})

    @classmethod
    def load(cls, dir_path: str) -> MDHAN:
        arrays, checkpoint_dict = load_checkpoint(dir_path)

        config = ModelConfig(**checkpoint_dict["config"])
        embedding = arrays.pop("embedding")

        expected = ModelParams.shapes(config)
        if {name: tuple(values.shape) for name, values in arrays.items()} != expected:
            raise ShapeError(f"Checkpoint tensors in {dir_path} don't match the shapes required by its config")

        return cls(config, ModelParams(embedding, arrays))
