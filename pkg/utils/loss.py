import torch
import torch.nn as nn
import torch.nn.functional as F


def get_loss(loss_type):
    if loss_type == 'cross_entropy':
        return MaskedCrossEntropy()
    raise NotImplementedError(loss_type)


class MaskedCrossEntropy(nn.Module):
    """Mean softmax cross-entropy over the nodes selected by a boolean mask"""

    def forward(self, logits, labels, mask):
        if not bool(mask.any()):
            raise ValueError("loss mask selects no nodes")
        return F.cross_entropy(logits[mask], labels[mask], reduction='mean')


class L2Penalty(nn.Module):
    """(weight_decay / 2) * sum of squared entries of the given tensors"""

    def __init__(self, weight_decay):
        super().__init__()
        self.weight_decay = weight_decay

    def forward(self, tensors):
        if self.weight_decay == 0:
            return torch.zeros((), dtype=torch.float64)
        return 0.5 * self.weight_decay * sum((t * t).sum() for t in tensors)
