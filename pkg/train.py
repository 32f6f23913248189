import copy

import numpy as np
import torch
from tqdm import tqdm

from classification_module import make_model, DTYPE
from dataset.utils import carve_validation
from metrics import StreamClsMetrics
from utils import get_loss, get_regularizer, derive_seed, set_seed

BETAS = (0.9, 0.999)
EPS = 1e-8


class TrainConfig:
    """
    Hyper-parameters of fit. Grids follow the published protocol: learning rate
    in {0.1, 0.01, 0.001}, weight decay in {0, 1e-5, 1e-4, 1e-3, 1e-2}.
    """

    def __init__(self, lr_grid=(0.1, 0.01, 0.001), weight_decay_grid=(0.0, 1e-5, 1e-4, 1e-3, 1e-2), hidden=128,
                 K=3, epochs=300, patience=50, seed=44, val_fraction=0.1, progress=False):
        if not lr_grid or not weight_decay_grid:
            raise ValueError("learning-rate and weight-decay grids must be non-empty")
        if epochs < 1:
            raise ValueError(f"epochs must be positive, got {epochs}")
        self.lr_grid = tuple(float(x) for x in lr_grid)
        self.weight_decay_grid = tuple(float(x) for x in weight_decay_grid)
        self.hidden = hidden
        self.K = K
        self.epochs = epochs
        self.patience = patience
        self.seed = seed
        self.val_fraction = val_fraction
        self.progress = progress

    @classmethod
    def from_opts(cls, opts):
        return cls(lr_grid=opts.lr, weight_decay_grid=opts.weight_decay, hidden=opts.hidden, K=opts.k,
                   epochs=opts.epochs, patience=opts.patience, seed=opts.seed, progress=opts.progress)

    def cells(self):
        """(cell index, lr, weight decay) over the full grid"""
        pairs = [(lr, wd) for lr in self.lr_grid for wd in self.weight_decay_grid]
        return [(i, lr, wd) for i, (lr, wd) in enumerate(pairs)]


def as_tensor(pf):
    return torch.as_tensor(pf.stack(), dtype=DTYPE)


def forward(features, model):
    """(Z, logits) for stacked term features"""
    logits, extra = model(features)
    return extra["embeddings"], logits


def loss_and_grad(features, model, labels, mask, weight_decay):
    """
    Mean cross-entropy over the masked nodes plus (weight_decay / 2) * ||W||^2
    on every weight tensor (biases exempt). Returns the loss and one gradient
    per model parameter, in model.parameters() order.
    """
    mask = torch.as_tensor(mask, dtype=torch.bool)
    labels = torch.as_tensor(labels, dtype=torch.long)
    _, logits = forward(features, model)
    loss = get_loss('cross_entropy')(logits, labels, mask) + get_regularizer(model, weight_decay).penalty()
    grads = torch.autograd.grad(loss, list(model.parameters()))
    return loss.item(), grads


def make_optimizer(model, lr):
    return torch.optim.Adam(model.parameters(), lr=lr, betas=BETAS, eps=EPS, weight_decay=0)


def adam_step(model, optimizer, grads):
    """One bias-corrected Adam update with the given gradients"""
    params = list(model.parameters())
    if len(grads) != len(params):
        raise ValueError(f"{len(grads)} gradients for {len(params)} parameters")
    for p, g in zip(params, grads):
        if not torch.isfinite(g).all():
            raise FloatingPointError("non-finite gradient in adam_step")
        p.grad = g.detach().clone()
    optimizer.step()
    optimizer.zero_grad(set_to_none=True)
    return model


class Trainer:
    def __init__(self, model, lr, weight_decay, logger=None):
        self.model = model
        self.lr = lr
        self.weight_decay = weight_decay
        self.optimizer = make_optimizer(model, lr)
        self.logger = logger

    def train(self, cur_epoch, features, labels, mask):
        """Train one full-batch epoch and return the loss"""
        self.model.train()
        loss, grads = loss_and_grad(features, self.model, labels, mask, self.weight_decay)
        adam_step(self.model, self.optimizer, grads)
        if self.logger is not None:
            self.logger.debug(f"Epoch {cur_epoch}, Loss={loss}")
        return loss

    def predict(self, features):
        self.model.eval()
        with torch.no_grad():
            z, logits = forward(features, self.model)
        return z, logits.argmax(dim=1).numpy()

    def validate(self, features, labels, mask, metrics):
        """Feed the nodes in mask to metrics and return their accuracy"""
        metrics.reset()
        _, pred = self.predict(features)
        metrics.update(labels[mask], pred[mask])
        return metrics.accuracy()

    def state_dict(self):
        return {"model_state": copy.deepcopy(self.model.state_dict()),
                "optimizer_state": copy.deepcopy(self.optimizer.state_dict())}

    def load_state_dict(self, state):
        self.model.load_state_dict(state["model_state"])
        self.optimizer.load_state_dict(state["optimizer_state"])


def train_cell(features, labels, train_mask, val_mask, model, lr, weight_decay, cfg, logger=None, tag="cell"):
    """
    Train one grid cell with early stopping on validation accuracy and restore
    the best checkpoint. Returns (trainer, best val accuracy, best epoch,
    epochs run).
    """
    trainer = Trainer(model, lr, weight_decay, logger)
    metrics = StreamClsMetrics(int(labels.max()) + 1)
    best_acc, best_epoch, best_state = -1.0, -1, None
    epochs_run = 0
    for cur_epoch in range(cfg.epochs):
        loss = trainer.train(cur_epoch, features, labels, train_mask)
        val_acc = trainer.validate(features, labels, val_mask, metrics)
        epochs_run = cur_epoch + 1
        if logger is not None:
            logger.add_scalar(f"{tag}/Loss", loss, cur_epoch)
            logger.add_scalar(f"{tag}/Val_Acc", val_acc, cur_epoch)
        if val_acc > best_acc:
            best_acc, best_epoch = val_acc, cur_epoch
            best_state = trainer.state_dict()
        elif cur_epoch - best_epoch >= cfg.patience:
            break
    trainer.load_state_dict(best_state)
    return trainer, best_acc, best_epoch, epochs_run


def _split_warnings(labels, train_mask, num_classes):
    present = set(np.unique(labels[train_mask]).tolist())
    return [f"class {c} has no train node" for c in range(num_classes) if c not in present]


def fit(pf, graph, cfg, method, logger=None):
    """
    Carve a seeded validation split from train, grid-search (lr, weight decay)
    and keep the cell with the best validation accuracy (ties go to the lower
    weight decay, then the lower learning rate). Returns (trainer, report).
    """
    labels = graph.labels
    num_classes = graph.num_classes
    warnings = _split_warnings(labels, graph.train_mask, num_classes)
    for w in warnings:
        if logger is not None:
            logger.warning(w)

    train_mask, val_mask = carve_validation(graph.train_mask, labels, cfg.val_fraction, cfg.seed)
    features = as_tensor(pf)

    grid = []
    best = None
    for cell, lr, wd in tqdm(cfg.cells(), desc="grid", disable=not cfg.progress):
        set_seed(derive_seed(cfg.seed, cell))
        model = make_model(method, len(pf), pf.d0, cfg.hidden, num_classes)
        trainer, val_acc, best_epoch, epochs_run = train_cell(features, labels, train_mask, val_mask, model,
                                                              lr, wd, cfg, logger, tag=f"cell{cell}")
        row = {"lr": lr, "weight_decay": wd, "val_acc": val_acc, "best_epoch": best_epoch, "epochs_run": epochs_run}
        grid.append(row)
        if logger is not None:
            logger.info(f"lr={lr} wd={wd}: val_acc={val_acc:.4f} after {epochs_run} epochs")
        key = (-val_acc, wd, lr)
        if best is None or key < best[0]:
            best = (key, row, trainer)

    _, best_row, trainer = best
    test = None
    if graph.test_mask.any():
        metrics = StreamClsMetrics(num_classes)
        _, pred = trainer.predict(features)
        metrics.update(labels[graph.test_mask], pred[graph.test_mask])
        results = metrics.get_results()
        test = results["Metrics"]
        if logger is not None:
            logger.info(f"Test scores of the selected cell:{metrics.to_str(results)}")
    report = {
        "method": method,
        "grid": grid,
        "best": best_row,
        "test": test.to_report() if test is not None else None,
        "warnings": warnings,
        "term_count": len(pf),
        "parameter_count": int(sum(p.numel() for p in trainer.model.parameters())),
        "split_sizes": {"train": int(train_mask.sum()), "val": int(val_mask.sum()),
                        "test": int(graph.test_mask.sum())},
    }
    return trainer, report
