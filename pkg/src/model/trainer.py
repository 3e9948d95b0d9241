from __future__ import annotations

import os
import sys
import time
from math import ceil

import numpy as np
from loguru import logger
from tqdm import tqdm

from src.autodiff import Tape, Adam, NonFiniteError
from src.data.dataset import PreparedUser
from src.model.models.mdhan import MDHAN
from src.utils import log_wandb, format_time, make_rng, dump_json


class TrainingDivergedError(ArithmeticError):
    """Raised when the loss (or any intermediate value) stops being finite during training"""


class MDHANTrainer:

    def __init__(self, model: MDHAN, output_dir: str = None, should_log: bool = False):
        self.model = model
        self.output_dir = output_dir
        self.should_log = should_log

        self.optimizer = Adam(model.params.trainable(), lr=model.config.lr)

    def train_step(self, batch, rng: np.random.Generator) -> float:
        params = self.model.params.trainable()

        with Tape() as tape:
            output = self.model.forward(batch, train=True, rng=rng)
            loss = self.model.loss(output, batch)

        grads = tape.backward(loss, list(params.values()))
        self.optimizer.step(dict(zip(params, grads)))

        return loss.item()

    def accuracy(self, users: list[PreparedUser]) -> float:
        labels = np.array([user.label for user in users])
        return float((self.model.predict(users) == labels).mean())

    def train(self, train_users: list[PreparedUser]) -> list[dict]:
        """
        Mini-batch Adam over the train users, shuffled with a seeded permutation at each epoch.
        Returns the history with train loss (mean of the batch losses) and train accuracy of each epoch
        """

        if len(train_users) == 0:
            raise ValueError("Can't train without train users!")

        cfg = self.model.config
        n_epochs = cfg.epochs
        total_n_batch = ceil(len(train_users) / cfg.batch_size)

        print(f"# Start training for {n_epochs} epochs\n")

        history = []
        start = time.time()
        for current_epoch in range(1, n_epochs + 1):

            order = make_rng(cfg.seed, 2, current_epoch).permutation(len(train_users))
            dropout_rng = make_rng(cfg.seed, 5, current_epoch)

            pbar = tqdm(range(total_n_batch), total=total_n_batch)

            train_loss = 0
            for i in pbar:
                batch_users = [train_users[idx] for idx in order[i * cfg.batch_size:(i + 1) * cfg.batch_size]]
                batch = self.model.make_batch(batch_users)

                try:
                    batch_loss = self.train_step(batch, dropout_rng)
                except NonFiniteError as e:
                    logger.error(f"Non finite value at epoch {current_epoch}, batch {i + 1}: {e}")
                    raise TrainingDivergedError(f"training diverged at epoch {current_epoch}, "
                                                f"batch {i + 1}: {e}") from None

                train_loss += batch_loss
                pbar.set_description(f"Epoch {current_epoch}/{n_epochs}, Loss -> {(train_loss / (i + 1)):.6f}")

            pbar.close()

            train_loss /= total_n_batch
            train_accuracy = self.accuracy(train_users)

            history.append({"epoch": current_epoch, "loss": train_loss, "accuracy": train_accuracy})

            log_wandb({
                "train/loss": train_loss,
                "train/accuracy": train_accuracy,
                "train/epoch": current_epoch
            }, self.should_log)

            # simple newline to better separate different epochs
            print(file=sys.stderr)  # stderr to avoid overlap with tqdm

        elapsed_time = time.time() - start

        if self.output_dir is not None:
            self.model.save(self.output_dir)
            dump_json(history, os.path.join(self.output_dir, "history.json"))
            print(f"# Train completed! Model is saved into {self.output_dir}")
        else:
            print("# Train completed!")

        print(f"# Elapsed time: {format_time(elapsed_time)}")

        log_wandb({"train/elapsed_time (min)": int(elapsed_time // 60)}, self.should_log)

        return history
