import numpy as np


def _allocate(count, ratios):
    # largest-remainder rounding so per-split sizes sum to count
    exact = np.asarray(ratios) * count
    sizes = np.floor(exact).astype(int)
    remainder = count - sizes.sum()
    order = np.argsort(-(exact - sizes), kind='stable')
    sizes[order[:remainder]] += 1
    return sizes


def split_masks(labels, ratios, seed):
    """
    Disjoint boolean masks, one per ratio, covering every labeled node
    (label >= 0). Each class is split on its own when it has at least one node
    per non-empty split; smaller classes are pooled and split together.
    """
    ratios = np.asarray(ratios, dtype=np.float64)
    if np.any(ratios < 0) or not np.isclose(ratios.sum(), 1.0, rtol=0, atol=1e-9):
        raise ValueError(f"split ratios must be non-negative and sum to 1, got {ratios.tolist()}")
    labels = np.asarray(labels)
    rng = np.random.default_rng(seed)
    masks = np.zeros((len(ratios), len(labels)), dtype=bool)
    active = int((ratios > 0).sum())

    pooled = []
    for c in np.unique(labels[labels >= 0]):
        idxs = np.flatnonzero(labels == c)
        if len(idxs) < active:
            pooled.append(idxs)
            continue
        _assign(masks, rng.permutation(idxs), ratios)
    if pooled:
        _assign(masks, rng.permutation(np.concatenate(pooled)), ratios)
    return tuple(masks)


def _assign(masks, idxs, ratios):
    bounds = np.concatenate([[0], np.cumsum(_allocate(len(idxs), ratios))])
    for s in range(len(ratios)):
        masks[s, idxs[bounds[s]:bounds[s + 1]]] = True


def carve_validation(train_mask, labels, fraction, seed, min_per_class=10):
    """
    Move `fraction` of the train nodes to a validation mask. Stratified when
    every train class has at least min_per_class nodes, uniform otherwise.
    Returns (train_mask, val_mask).
    """
    train_idxs = np.flatnonzero(train_mask)
    if len(train_idxs) < 2:
        raise ValueError("need at least two train nodes to carve a validation split")
    rng = np.random.default_rng(seed)
    val = np.zeros_like(train_mask, dtype=bool)
    classes, counts = np.unique(labels[train_idxs], return_counts=True)

    if counts.min() >= min_per_class:
        for c in classes:
            idxs = rng.permutation(train_idxs[labels[train_idxs] == c])
            val[idxs[:int(round(fraction * len(idxs)))]] = True
    else:
        take = min(max(1, int(round(fraction * len(train_idxs)))), len(train_idxs) - 1)
        val[rng.permutation(train_idxs)[:take]] = True

    if not val.any():
        val[rng.choice(train_idxs)] = True
    return train_mask & ~val, val

