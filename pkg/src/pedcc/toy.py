"""Small tanh network trained with PEDCC-Loss on Gaussian blobs.

A desk-scale stand-in for a CNN classifier whose last layer is replaced by
fixed centroids. Used to watch test features settle onto the
``(k - 1)``-dimensional centroid span, and to compare feature widths.
"""
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from pedcc.errors import InvalidShape, NonFinite
from pedcc.frame import subspace_angles
from pedcc.generator import ChargeSimConfig, generate_iterative_charge, generate_pedcc
from pedcc.linalg import make_rng
from pedcc.loss import LabeledBatch, LossParams, cos_logits, loss_total_with_grad

BLOB_RADIUS = 10.0
TRAIN_FRACTION = 0.8


@dataclass
class SynthDataset:
    samples: np.ndarray
    labels: np.ndarray
    k_classes: int
    blob_centers: np.ndarray
    blob_sigma: float
    seed: int
    train_idx: np.ndarray
    test_idx: np.ndarray

    @property
    def x_train(self):
        return self.samples[self.train_idx]

    @property
    def y_train(self):
        return self.labels[self.train_idx]

    @property
    def x_test(self):
        return self.samples[self.test_idx]

    @property
    def y_test(self):
        return self.labels[self.test_idx]


def make_blobs(k, d_in, per_class, sigma, seed):
    """Isotropic blobs around centers drawn on a sphere of radius 10.

    The 80/20 train/test split is stratified: the first 80% of every
    class's (shuffled) samples go to training.
    """
    if k < 2 or d_in < 2 or per_class < 2:
        raise InvalidShape(f"need k >= 2, d_in >= 2, per_class >= 2; got {k}, {d_in}, {per_class}")
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    rng = make_rng(seed)
    centers = rng.standard_normal((k, d_in))
    centers *= BLOB_RADIUS / np.linalg.norm(centers, axis=1)[:, None]
    labels = np.repeat(np.arange(k), per_class)
    samples = centers[labels] + sigma * rng.standard_normal((k * per_class, d_in))

    n_train = max(1, min(per_class - 1, int(round(TRAIN_FRACTION * per_class))))
    train, test = [], []
    for c in range(k):
        idx = rng.permutation(np.flatnonzero(labels == c))
        train.append(idx[:n_train])
        test.append(idx[n_train:])
    return SynthDataset(
        samples, labels, k, centers, float(sigma), seed,
        np.sort(np.concatenate(train)), np.sort(np.concatenate(test)),
    )


@dataclass
class ToyModel:
    """Affine layers with tanh in between; the last layer is linear.

    Inputs are standardized with the stored mean and scale first.
    """

    weights: list
    biases: list
    input_mean: np.ndarray
    input_scale: np.ndarray

    @classmethod
    def init(cls, sizes, rng, input_mean=None, input_scale=None):
        weights, biases = [], []
        for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
            weights.append(rng.standard_normal((fan_in, fan_out)) / np.sqrt(fan_in))
            biases.append(np.zeros(fan_out))
        mean = np.zeros(sizes[0]) if input_mean is None else input_mean
        scale = np.ones(sizes[0]) if input_scale is None else input_scale
        return cls(weights, biases, mean, scale)

    def forward(self, x, keep=False):
        h = (x - self.input_mean) / self.input_scale
        acts = [h]
        last = len(self.weights) - 1
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            h = h @ w + b
            if i < last:
                h = np.tanh(h)
            acts.append(h)
        return (h, acts) if keep else h

    def backward(self, acts, grad_out):
        """Parameter gradients given activations from ``forward(keep=True)``."""
        dw, db = [None] * len(self.weights), [None] * len(self.weights)
        g = grad_out
        for i in reversed(range(len(self.weights))):
            dw[i] = acts[i].T @ g
            db[i] = g.sum(axis=0)
            if i > 0:
                g = (g @ self.weights[i].T) * (1.0 - acts[i] ** 2)
        return dw, db

    def loss_and_grads(self, x, y, centroids, params):
        feats, acts = self.forward(x, keep=True)
        report = loss_total_with_grad(LabeledBatch(feats, y), centroids, params)
        dw, db = self.backward(acts, report.grad_features)
        return report.total, dw, db

    def copy(self):
        return ToyModel(
            [w.copy() for w in self.weights], [b.copy() for b in self.biases],
            self.input_mean.copy(), self.input_scale.copy(),
        )


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 200
    batch_size: int = 32
    learning_rate: float = 0.05
    loss_params: LossParams = field(default_factory=LossParams)
    feature_dim: int = 8
    hidden: int = 32
    seed: int = 0

    def __post_init__(self):
        if self.epochs < 0:
            raise ValueError("epochs must be non-negative")
        if self.batch_size < 1 or self.feature_dim < 1 or self.hidden < 1:
            raise ValueError("batch_size, feature_dim and hidden must be positive")
        if self.learning_rate < 0:
            raise ValueError("learning_rate must be non-negative")


@dataclass
class TrainReport:
    feature_dim: int
    final_train_accuracy: float
    final_test_accuracy: float
    mean_subspace_angle_deg: float
    loss_curve: list
    angle_curve: list
    centroid_method: str


def make_centroids(k, feature_dim, seed):
    """Rotated analytic centroids, or charge-model ones when ``k > dim + 1``."""
    if k <= feature_dim + 1:
        return generate_pedcc(k, feature_dim, seed)
    warnings.warn(
        f"feature_dim={feature_dim} < k-1={k - 1}: equal-angle centroids do not exist, "
        "falling back to the charge model",
        stacklevel=3,
    )
    return generate_iterative_charge(k, feature_dim, ChargeSimConfig(seed=seed))


def predict(model, x, centroids):
    feats = model.forward(x)
    return np.argmax(cos_logits(LabeledBatch(feats, np.zeros(len(x), dtype=int)), centroids), axis=1)


def _accuracy(model, x, y, centroids):
    return float(np.mean(predict(model, x, centroids) == y))


def _mean_angle_deg(model, x, centroids):
    if centroids.k - 1 >= centroids.n:
        return 0.0  # span is the whole feature space
    return float(np.degrees(np.mean(subspace_angles(centroids, model.forward(x)))))


def train(dataset, cfg):
    """Mini-batch gradient descent on PEDCC-Loss.

    ``loss_curve`` and ``angle_curve`` hold ``epochs + 1`` entries: the
    untrained state, then the state after every epoch. Losses are full
    training-set totals; angles are the mean per-sample angle of test
    features to the centroid span, in degrees.
    """
    k = dataset.k_classes
    centroids = make_centroids(k, cfg.feature_dim, cfg.seed)
    rng = make_rng(cfg.seed)
    x_tr, y_tr = dataset.x_train, dataset.y_train
    x_te = dataset.x_test
    scale = x_tr.std(axis=0)
    scale[scale == 0] = 1.0
    model = ToyModel.init(
        [x_tr.shape[1], cfg.hidden, cfg.feature_dim], rng, x_tr.mean(axis=0), scale
    )
    params = cfg.loss_params

    def full_loss():
        total, _, _ = model.loss_and_grads(x_tr, y_tr, centroids, params)
        if not np.isfinite(total):
            raise NonFinite("training loss became non-finite; lower the learning rate")
        return total

    loss_curve = [full_loss()]
    angle_curve = [_mean_angle_deg(model, x_te, centroids)]
    n = len(x_tr)
    for _ in range(cfg.epochs):
        order = rng.permutation(n)
        for start in range(0, n, cfg.batch_size):
            idx = order[start:start + cfg.batch_size]
            total, dw, db = model.loss_and_grads(x_tr[idx], y_tr[idx], centroids, params)
            grads = dw + db
            if not np.isfinite(total) or not all(np.all(np.isfinite(g)) for g in grads):
                raise NonFinite("loss or gradient became non-finite; lower the learning rate")
            for w, g in zip(model.weights, dw):
                w -= cfg.learning_rate * g
            for b, g in zip(model.biases, db):
                b -= cfg.learning_rate * g
        loss_curve.append(full_loss())
        angle_curve.append(_mean_angle_deg(model, x_te, centroids))

    report = TrainReport(
        feature_dim=cfg.feature_dim,
        final_train_accuracy=_accuracy(model, x_tr, y_tr, centroids),
        final_test_accuracy=_accuracy(model, x_te, dataset.y_test, centroids),
        mean_subspace_angle_deg=angle_curve[-1],
        loss_curve=loss_curve,
        angle_curve=angle_curve,
        centroid_method=centroids.provenance,
    )
    return model, report


def dim_sweep(dataset, dims, cfg):
    """One training run per feature width, everything else held fixed."""
    for d in dims:
        if d < 2:
            raise InvalidShape(f"feature dims must be >= 2, got {d}")
    return [train(dataset, replace(cfg, feature_dim=d))[1] for d in dims]
