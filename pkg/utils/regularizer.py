from .loss import L2Penalty


def get_regularizer(model, weight_decay):
    if weight_decay < 0:
        raise ValueError(f"weight decay must be non-negative, got {weight_decay}")
    return L2(model, weight_decay)


class Regularizer:
    def penalty(self):
        """ Stub method """
        raise NotImplementedError


class L2(Regularizer):
    """
    Explicit L2 term added to the loss (not decoupled decay).
    Applies to every weight tensor of the model; biases are exempt.
    """

    def __init__(self, model, weight_decay):
        self.model = model
        self.weight_decay = weight_decay
        self.l2 = L2Penalty(weight_decay)

    def parameters(self):
        return [p for name, p in self.model.named_parameters() if not name.endswith('bias')]

    def penalty(self):
        return self.l2(self.parameters())
