from collections import namedtuple

import numpy as np

from graph.sparse import SparseMatrix

from .multigraph import Multigraph
from .utils import split_masks

_FIELDS = ['n', 'm', 'num_classes', 'p_in', 'p_out', 'noise', 'feat_dim', 'snr', 'seed', 'view_seeds']


class SyntheticSpec(namedtuple('SyntheticSpec', _FIELDS)):
    """
    Planted-partition multigraph recipe.
    noise is one edge-flip probability per view (a scalar applies to all views);
    view_seeds, when given, fixes each view's sampling stream.
    """
    __slots__ = ()

    def __new__(cls, n=300, m=3, num_classes=3, p_in=0.1, p_out=0.01, noise=0.0, feat_dim=16, snr=1.0,
                seed=44, view_seeds=None):
        if np.isscalar(noise):
            noise = (float(noise),) * m
        noise = tuple(float(x) for x in noise)
        if view_seeds is not None:
            view_seeds = tuple(int(s) for s in view_seeds)
        return super().__new__(cls, n, m, num_classes, p_in, p_out, noise, feat_dim, snr, seed, view_seeds)

    def check(self):
        if self.m < 2:
            raise ValueError(f"m must be at least 2, got {self.m}")
        if self.num_classes < 2 or self.n < self.num_classes:
            raise ValueError(f"need 2 <= num_classes <= n, got num_classes={self.num_classes}, n={self.n}")
        if not 0 <= self.p_out < self.p_in <= 1:
            raise ValueError(f"need 0 <= p_out < p_in <= 1, got p_in={self.p_in}, p_out={self.p_out}")
        if len(self.noise) != self.m or any(not 0 <= x <= 1 for x in self.noise):
            raise ValueError(f"need {self.m} flip probabilities in [0, 1], got {self.noise}")
        if self.view_seeds is not None and len(self.view_seeds) != self.m:
            raise ValueError(f"need {self.m} view seeds, got {len(self.view_seeds)}")
        if self.feat_dim < self.num_classes:
            raise ValueError(f"feat_dim {self.feat_dim} must be at least num_classes {self.num_classes}")


def _sample_view(labels, p_in, p_out, noise, rng):
    n = len(labels)
    src, dst = np.triu_indices(n, k=1)
    prob = np.where(labels[src] == labels[dst], p_in, p_out)
    present = rng.random(len(src)) < prob
    if noise > 0:
        present ^= rng.random(len(src)) < noise
    src, dst = src[present], dst[present]
    return SparseMatrix.from_edges(n, np.concatenate([src, dst]), np.concatenate([dst, src]))


def generate_synthetic(spec):
    """
    Multi-view stochastic block model: one shared planted partition, every view
    sampled independently and then corrupted by its own edge flips. Features are
    snr-scaled one-hot class centres plus unit Gaussian noise; masks are a
    stratified 60/20/20 split. Fully determined by spec.seed (and view_seeds).
    """
    spec.check()
    seq = np.random.SeedSequence(spec.seed)
    label_seq, feat_seq, split_seq, view_seq = seq.spawn(4)

    labels = np.random.default_rng(label_seq).permutation(np.arange(spec.n) % spec.num_classes)

    if spec.view_seeds is not None:
        view_rngs = [np.random.default_rng(s) for s in spec.view_seeds]
    else:
        view_rngs = [np.random.default_rng(s) for s in view_seq.spawn(spec.m)]
    views = [_sample_view(labels, spec.p_in, spec.p_out, spec.noise[v], view_rngs[v]) for v in range(spec.m)]

    centres = np.zeros((spec.num_classes, spec.feat_dim))
    centres[np.arange(spec.num_classes), np.arange(spec.num_classes)] = spec.snr
    features = centres[labels] + np.random.default_rng(feat_seq).standard_normal((spec.n, spec.feat_dim))

    split_seed = int(split_seq.generate_state(1)[0])
    train, val, test = split_masks(labels, (0.6, 0.2, 0.2), split_seed)
    return Multigraph(views, features, labels, train, val, test,
                      view_names=[f"view{v}" for v in range(spec.m)], name='synthetic')
