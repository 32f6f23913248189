import json
import time

import numpy as np
import pytest
import torch

from classification_module import make_model
from dataset import Multigraph, SyntheticSpec, generate_synthetic, split_masks
from dataset.utils import carve_validation
from graph import SparseMatrix, VoteConfig, extract_edge_topology, extract_subgraph_topology
from modules.propagation import PGCN, SMGCN, enumerate_terms, propagate
from train import TrainConfig, as_tensor, fit, train_cell
from utils import derive_seed, set_seed


def block_graph(n=40, seed=0):
    """Two classes, two identical views made of one clique per class, separable features"""
    rng = np.random.default_rng(seed)
    labels = np.arange(n) % 2
    same = (labels[:, None] == labels[None, :]).astype(float)
    np.fill_diagonal(same, 0)
    views = [SparseMatrix.from_dense(same), SparseMatrix.from_dense(same)]
    features = np.stack([2.0 * labels - 1.0, rng.standard_normal(n) * 0.01], axis=1)
    train, val, test = split_masks(labels, (0.6, 0.2, 0.2), seed)
    return Multigraph(views, features, labels, train, val, test)


def smgcn_features(graph, K=2):
    cfg = VoteConfig()
    terms = enumerate_terms(SMGCN, graph.m, K)
    return propagate(graph, terms, extract_edge_topology(graph, cfg), extract_subgraph_topology(graph, cfg))


def test_separable_instance_is_solved():
    graph = block_graph()
    cfg = TrainConfig(lr_grid=(0.01,), weight_decay_grid=(0.0,), hidden=8, K=2, epochs=100, patience=100)
    _, report = fit(smgcn_features(graph), graph, cfg, SMGCN)
    assert report["test"]["ACC"] == 1.0


def test_single_cell_grid_equals_direct_training():
    graph = block_graph(seed=1)
    pf = smgcn_features(graph)
    cfg = TrainConfig(lr_grid=(0.01,), weight_decay_grid=(1e-4,), hidden=8, K=2, epochs=30, patience=5, seed=7)
    trainer, report = fit(pf, graph, cfg, SMGCN)

    train_mask, val_mask = carve_validation(graph.train_mask, graph.labels, cfg.val_fraction, cfg.seed)
    set_seed(derive_seed(cfg.seed, 0))
    model = make_model(SMGCN, len(pf), pf.d0, cfg.hidden, graph.num_classes)
    direct, val_acc, best_epoch, epochs_run = train_cell(as_tensor(pf), graph.labels, train_mask, val_mask, model,
                                                         0.01, 1e-4, cfg)
    assert report["best"] == {"lr": 0.01, "weight_decay": 1e-4, "val_acc": val_acc, "best_epoch": best_epoch,
                              "epochs_run": epochs_run}
    for a, b in zip(trainer.model.parameters(), direct.model.parameters()):
        assert torch.equal(a, b)


class RecordingLogger:
    def __init__(self):
        self.lines = []

    def info(self, msg):
        self.lines.append(msg)

    warning = debug = info

    def add_scalar(self, tag, value, step=None):
        pass


def test_fit_logs_per_class_test_scores():
    graph = block_graph(seed=3)
    cfg = TrainConfig(lr_grid=(0.01,), weight_decay_grid=(0.0,), hidden=8, K=2, epochs=100, patience=100)
    logger = RecordingLogger()
    _, report = fit(smgcn_features(graph), graph, cfg, SMGCN, logger)
    scores = [line for line in logger.lines if line.startswith("Test scores of the selected cell")]
    assert len(scores) == 1
    assert "class 0" in scores[0] and "class 1" in scores[0]
    assert "Overall Acc: %f" % report["test"]["ACC"] in scores[0]


def test_train_cell_restores_best_checkpoint():
    graph = block_graph(seed=4)
    pf = smgcn_features(graph)
    cfg = TrainConfig(lr_grid=(0.1,), weight_decay_grid=(0.0,), hidden=8, K=2, epochs=40, patience=40)
    train_mask, val_mask = carve_validation(graph.train_mask, graph.labels, cfg.val_fraction, cfg.seed)
    set_seed(0)
    model = make_model(SMGCN, len(pf), pf.d0, cfg.hidden, graph.num_classes)
    trainer, val_acc, _, _ = train_cell(as_tensor(pf), graph.labels, train_mask, val_mask, model, 0.1, 0.0, cfg)
    _, pred = trainer.predict(as_tensor(pf))
    assert (pred[val_mask] == graph.labels[val_mask]).mean() == val_acc
    state = trainer.state_dict()
    assert set(state) == {"model_state", "optimizer_state"}
    assert all(torch.equal(state["model_state"][k], v) for k, v in trainer.model.state_dict().items())


def test_report_schema_is_seed_independent():
    graph = block_graph(seed=2)
    pf = smgcn_features(graph)
    reports = []
    for seed in (1, 2):
        cfg = TrainConfig(lr_grid=(0.1, 0.01), weight_decay_grid=(0.0, 1e-3), hidden=4, epochs=5, seed=seed)
        reports.append(fit(pf, graph, cfg, SMGCN)[1])
    assert reports[0].keys() == reports[1].keys()
    assert [(r["lr"], r["weight_decay"]) for r in reports[0]["grid"]] == [(0.1, 0.0), (0.1, 1e-3), (0.01, 0.0),
                                                                        (0.01, 1e-3)]
    assert set(reports[0]["test"]) == {"ACC", "F1", "NMI"}
    assert reports[0]["term_count"] == len(pf)


def test_fit_is_reproducible():
    graph = block_graph(seed=3)
    pf = smgcn_features(graph)
    cfg = TrainConfig(lr_grid=(0.1, 0.01), weight_decay_grid=(0.0, 1e-3), hidden=4, epochs=20, seed=5)
    a = fit(pf, graph, cfg, SMGCN)[1]
    b = fit(pf, graph, cfg, SMGCN)[1]
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


def test_selection_prefers_lower_weight_decay_then_lower_lr():
    graph = block_graph()
    pf = smgcn_features(graph)
    cfg = TrainConfig(lr_grid=(0.1, 0.05), weight_decay_grid=(1e-3, 0.0), hidden=8, epochs=60, patience=60)
    _, report = fit(pf, graph, cfg, SMGCN)
    best_acc = max(r["val_acc"] for r in report["grid"])
    tied = sorted((r["weight_decay"], r["lr"]) for r in report["grid"] if r["val_acc"] == best_acc)
    assert (report["best"]["weight_decay"], report["best"]["lr"]) == tied[0]


def test_missing_train_class_is_a_warning():
    graph = block_graph()
    train = graph.train_mask & (graph.labels == 0)
    graph = Multigraph(graph.views, graph.features, graph.labels, train, graph.val_mask, graph.test_mask)
    cfg = TrainConfig(lr_grid=(0.01,), weight_decay_grid=(0.0,), hidden=4, epochs=3)
    _, report = fit(smgcn_features(graph), graph, cfg, SMGCN)
    assert report["warnings"] == ["class 1 has no train node"]


def test_config_validation():
    with pytest.raises(ValueError):
        TrainConfig(lr_grid=())
    with pytest.raises(ValueError):
        TrainConfig(epochs=0)
    assert len(TrainConfig().cells()) == 15


def test_synthetic_benchmark():
    start = time.time()
    torch.set_num_threads(1)
    spec = SyntheticSpec(n=600, m=3, num_classes=3, p_in=0.08, p_out=0.01, noise=(0.0, 0.0, 0.1), seed=44)
    graph = generate_synthetic(spec)
    cfg = TrainConfig(lr_grid=(0.01,), weight_decay_grid=(0.0, 1e-4), hidden=64, K=3, epochs=200, patience=30)

    _, smgcn = fit(smgcn_features(graph, K=3), graph, cfg, SMGCN)
    assert smgcn["test"]["ACC"] >= 0.90

    # a P-GCN over two copies of one view is the single-view P-GCN
    single_view = []
    for view, name in zip(graph.views, graph.view_names):
        g = graph.with_views([view, view], [name, name + "-copy"])
        pf = propagate(g, enumerate_terms(PGCN, 2, 1))
        single_view.append(fit(pf, g, cfg, PGCN)[1]["test"]["ACC"])
    assert smgcn["test"]["ACC"] >= max(single_view)
    assert time.time() - start < 60
