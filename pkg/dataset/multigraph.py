import io
import json
import logging
import os

import jsonschema
import numpy as np

from graph.sparse import SparseMatrix, binarize, remove_diagonal, dump_matrix
from utils.utils import atomic_write

from .utils import split_masks

MANIFEST_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "title": "Multigraph dataset manifest",
    "type": "object",
    "required": ["name", "n", "d0", "m", "views", "features", "labels"],
    "properties": {
        "name": {"type": "string"},
        "n": {"type": "integer", "minimum": 1},
        "d0": {"type": "integer", "minimum": 1},
        "m": {"type": "integer", "minimum": 2},
        "views": {
            "type": "array",
            "minItems": 2,
            "items": {
                "type": "object",
                "required": ["name", "path"],
                "properties": {
                    "name": {"type": "string"},
                    "path": {"type": "string"},
                    "edges": {"type": "integer", "minimum": 0},
                },
            },
        },
        "features": {"type": "string"},
        "labels": {"type": "string"},
        "splits": {"type": "string"},
        "split_ratios": {"type": "array", "items": {"type": "number", "minimum": 0}, "minItems": 3, "maxItems": 3},
        "split_seed": {"type": "integer"},
    },
}

SPLIT_NAMES = ('train', 'val', 'test')


class Multigraph:
    """
    One node set with m >= 2 adjacency views.
    Arguments:
        views (list of SparseMatrix): per-view adjacencies, all n x n
        features (ndarray): n x d0 float64 node features
        labels (ndarray): n integer labels, -1 marks an unlabeled node
        train_mask, val_mask, test_mask (ndarray of bool): disjoint node masks
    """

    def __init__(self, views, features, labels, train_mask=None, val_mask=None, test_mask=None,
                 view_names=None, name='multigraph'):
        self.views = list(views)
        self.features = np.ascontiguousarray(features, dtype=np.float64)
        self.labels = np.asarray(labels, dtype=np.int64)
        n = self.n
        empty = np.zeros(n, dtype=bool)
        self.train_mask = np.asarray(train_mask if train_mask is not None else empty, dtype=bool)
        self.val_mask = np.asarray(val_mask if val_mask is not None else empty, dtype=bool)
        self.test_mask = np.asarray(test_mask if test_mask is not None else empty, dtype=bool)
        self.view_names = list(view_names) if view_names is not None else [f"view{v}" for v in range(self.m)]
        self.name = name
        self.validate()

    @property
    def n(self):
        return self.features.shape[0]

    @property
    def m(self):
        return len(self.views)

    @property
    def d0(self):
        return self.features.shape[1]

    @property
    def num_classes(self):
        labeled = self.labels[self.labels >= 0]
        return int(labeled.max()) + 1 if len(labeled) else 0

    def validate(self):
        n = self.n
        if self.features.ndim != 2:
            raise ValueError(f"features must be a 2-d matrix, got shape {self.features.shape}")
        if not np.all(np.isfinite(self.features)):
            raise ValueError("features must be finite")
        if self.m < 2:
            raise ValueError(f"a multigraph needs at least 2 views, got {self.m}")
        for v, view in enumerate(self.views):
            if view.n != n:
                raise ValueError(f"view {v} has {view.n} nodes but features have {n} rows")
        if self.labels.shape != (n,):
            raise ValueError(f"labels must have length {n}, got {self.labels.shape}")
        if len(self.view_names) != self.m:
            raise ValueError(f"{len(self.view_names)} view names for {self.m} views")
        for name in ('train_mask', 'val_mask', 'test_mask'):
            mask = getattr(self, name)
            if mask.shape != (n,):
                raise ValueError(f"{name} must have length {n}, got {mask.shape}")
            if np.any(mask & (self.labels < 0)):
                raise ValueError(f"{name} selects unlabeled nodes")
        if np.any((self.train_mask & self.val_mask) | (self.train_mask & self.test_mask) | (self.val_mask & self.test_mask)):
            raise ValueError("train/val/test masks must be disjoint")

    def with_views(self, views, view_names=None):
        return Multigraph(views, self.features, self.labels, self.train_mask, self.val_mask, self.test_mask,
                          view_names=view_names, name=self.name)

    def __repr__(self):
        return f"Multigraph(name={self.name!r}, n={self.n}, d0={self.d0}, m={self.m})"


class DatasetManifest:
    """Parsed and schema-checked manifest; file paths are absolute"""

    def __init__(self, spec, root):
        try:
            jsonschema.validate(spec, MANIFEST_SCHEMA)
        except jsonschema.ValidationError as e:
            field = "/".join(str(p) for p in e.absolute_path) or "<root>"
            raise ValueError(f"invalid manifest field '{field}': {e.message}") from e
        if len(spec['views']) != spec['m']:
            raise ValueError(f"manifest field 'm' is {spec['m']} but {len(spec['views'])} views are listed")

        self.root = root
        self.name = spec['name']
        self.n = spec['n']
        self.d0 = spec['d0']
        self.m = spec['m']
        self.view_names = [v['name'] for v in spec['views']]
        self.view_paths = [self._path(v['path']) for v in spec['views']]
        self.view_edges = [v.get('edges') for v in spec['views']]
        self.features_path = self._path(spec['features'])
        self.labels_path = self._path(spec['labels'])
        self.splits_path = self._path(spec['splits']) if 'splits' in spec else None
        self.split_ratios = tuple(spec.get('split_ratios', (0.6, 0.2, 0.2)))
        self.split_seed = spec.get('split_seed', 0)

    def _path(self, rel):
        return rel if os.path.isabs(rel) else os.path.join(self.root, rel)

    @classmethod
    def from_json(cls, path, data_root=None):
        path = resolve_manifest_path(path, data_root)
        with open(path, "r") as f:
            spec = json.load(f)
        return cls(spec, os.path.dirname(os.path.abspath(path)))


def resolve_manifest_path(path, data_root=None):
    candidates = [path]
    if data_root is not None and not os.path.isabs(path):
        candidates.append(os.path.join(data_root, path))
    for candidate in candidates:
        if os.path.isdir(candidate):
            candidate = os.path.join(candidate, 'manifest.json')
        if os.path.isfile(candidate):
            return candidate
    raise FileNotFoundError(f"manifest not found: {path}")


def _read(path, reader):
    if not os.path.isfile(path):
        raise FileNotFoundError(f"dataset file not found: {path}")
    try:
        return reader(path)
    except (OSError, ValueError) as e:
        raise ValueError(f"cannot read {path}: {e}") from e


def read_edge_list(path, n):
    """Symmetrized, deduplicated binary adjacency from 'src dst' lines; self-loops are dropped"""
    edges = _read(path, lambda p: np.loadtxt(p, dtype=np.int64, ndmin=2, comments='#'))
    if edges.size == 0:
        return SparseMatrix.zeros(n)
    if edges.shape[1] < 2:
        raise ValueError(f"{path}: expected 'src dst' per line")
    src, dst = edges[:, 0], edges[:, 1]
    try:
        adj = SparseMatrix.from_edges(n, np.concatenate([src, dst]), np.concatenate([dst, src]))
    except ValueError as e:
        raise ValueError(f"{path}: {e}") from e
    return remove_diagonal(binarize(adj))


def read_splits(path, n):
    names = _read(path, lambda p: np.loadtxt(p, dtype=str, ndmin=1))
    if names.shape != (n,):
        raise ValueError(f"manifest field 'splits': expected {n} rows, got {names.shape[0]}")
    unknown = set(names.tolist()) - set(SPLIT_NAMES) - {'none'}
    if unknown:
        raise ValueError(f"manifest field 'splits': unknown split names {sorted(unknown)}")
    return tuple(names == s for s in SPLIT_NAMES)


def check_edge_count(name, adj, declared, logger=None):
    """Advisory: accept either the stored-entry or the undirected-pair convention"""
    if declared is None:
        return True
    stored = remove_diagonal(adj).nnz
    if declared in (stored, stored // 2):
        return True
    msg = f"view '{name}' holds {stored} stored entries ({stored // 2} undirected edges), manifest declares {declared}"
    (logger or logging.getLogger(__name__)).warning(msg)
    return False


def load_dataset(manifest, logger=None):
    n = manifest.n
    features = _read(manifest.features_path, lambda p: np.loadtxt(p, delimiter=',', dtype=np.float64, ndmin=2))
    if features.shape != (n, manifest.d0):
        raise ValueError(f"manifest fields 'n'/'d0' declare ({n}, {manifest.d0}) "
                         f"but features have shape {features.shape}")
    labels = _read(manifest.labels_path, lambda p: np.loadtxt(p, dtype=np.int64, ndmin=1))
    if labels.shape != (n,):
        raise ValueError(f"manifest field 'n' declares {n} nodes but labels have {labels.shape[0]} rows")

    views = []
    for name, path, declared in zip(manifest.view_names, manifest.view_paths, manifest.view_edges):
        adj = read_edge_list(path, n)
        check_edge_count(name, adj, declared, logger)
        views.append(adj)

    if manifest.splits_path is not None:
        train, val, test = read_splits(manifest.splits_path, n)
    else:
        train, val, test = split_masks(labels, manifest.split_ratios, manifest.split_seed)

    return Multigraph(views, features, labels, train, val, test, view_names=manifest.view_names,
                      name=manifest.name)


def _savetxt(array, fmt, delimiter=' '):
    buf = io.StringIO()
    np.savetxt(buf, array, fmt=fmt, delimiter=delimiter)
    return buf.getvalue()


def save_dataset(graph, directory):
    """Write graph in the on-disk format load_dataset reads; returns the manifest path"""
    os.makedirs(os.path.join(directory, 'views'), exist_ok=True)
    views = []
    for name, view in zip(graph.view_names, graph.views):
        coo = view.csr.tocoo()
        upper = coo.row < coo.col
        edges = np.stack([coo.row[upper], coo.col[upper]], axis=1)
        rel = os.path.join('views', f"{name}.txt")
        atomic_write(os.path.join(directory, rel), _savetxt(edges, '%d'))
        views.append({"name": name, "path": rel, "edges": int(upper.sum())})

    atomic_write(os.path.join(directory, 'features.csv'), _savetxt(graph.features, '%.17g', delimiter=','))
    atomic_write(os.path.join(directory, 'labels.csv'), _savetxt(graph.labels, '%d'))
    splits = np.full(graph.n, 'none', dtype=object)
    splits[graph.train_mask] = 'train'
    splits[graph.val_mask] = 'val'
    splits[graph.test_mask] = 'test'
    atomic_write(os.path.join(directory, 'splits.csv'), "\n".join(splits.tolist()) + "\n")

    manifest = {
        "name": graph.name,
        "n": graph.n,
        "d0": graph.d0,
        "m": graph.m,
        "views": views,
        "features": "features.csv",
        "labels": "labels.csv",
        "splits": "splits.csv",
    }
    path = os.path.join(directory, 'manifest.json')
    atomic_write(path, json.dumps(manifest, indent=2) + "\n")
    return path
