import torch
import torch.nn as nn
import torch.nn.functional as functional

from modules import ViewPooling
from modules.propagation import PGCN

DTYPE = torch.float64


def make_model(method, num_terms, d0, d1, num_classes):
    if method == PGCN:
        conv = ParallelConv(num_terms, d0, d1)
    else:
        conv = PolynomialConv(num_terms, d0, d1)
    return MultigraphClassificationModule(conv, conv.out_channels, num_classes)


def glorot_(weights):
    """Glorot-uniform init of each d0 x d1 slice of a stacked weight tensor"""
    with torch.no_grad():
        for w in weights:
            nn.init.xavier_uniform_(w)
    return weights


class PolynomialConv(nn.Module):
    """
    Z = ReLU(sum_t F_t W_t) over precomputed term features F_t.
    Shared by SMGCN, MIMO and M-GCN, which differ only in their term lists.
    """

    def __init__(self, num_terms, in_channels, out_channels):
        super(PolynomialConv, self).__init__()
        self.projections = nn.Parameter(glorot_(torch.empty(num_terms, in_channels, out_channels, dtype=DTYPE)))
        self.out_channels = out_channels

    def forward(self, features):
        return functional.relu(torch.einsum('tnd,tdh->nh', features, self.projections))


class ParallelConv(nn.Module):
    """
    P-GCN: one projection per view, then min/max/mean across views taken
    before the activation.
    """

    def __init__(self, num_views, in_channels, out_channels):
        super(ParallelConv, self).__init__()
        self.projections = nn.Parameter(glorot_(torch.empty(num_views, in_channels, out_channels, dtype=DTYPE)))
        self.pool = ViewPooling()
        self.out_channels = 3 * out_channels

    def forward(self, features):
        per_view = torch.einsum('vnd,vdh->vnh', features, self.projections)
        return functional.relu(self.pool(per_view))


class MultigraphClassificationModule(nn.Module):

    def __init__(self, conv, embed_channels, num_classes):
        super(MultigraphClassificationModule, self).__init__()
        self.conv = conv
        self.cls = nn.Linear(embed_channels, num_classes).to(DTYPE)
        nn.init.xavier_uniform_(self.cls.weight)
        nn.init.zeros_(self.cls.bias)

    @property
    def num_terms(self):
        return self.conv.projections.shape[0]

    def forward(self, features):
        z = self.conv(features)
        return self.cls(z), {"embeddings": z}
