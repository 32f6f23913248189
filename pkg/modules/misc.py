import torch
import torch.nn as nn


class ViewPooling(nn.Module):
    def __init__(self):
        """Concatenate the element-wise min, max and mean across the leading (view) dimension"""
        super(ViewPooling, self).__init__()

    def forward(self, inputs):
        return torch.cat([inputs.min(dim=0).values, inputs.max(dim=0).values, inputs.mean(dim=0)], dim=1)
