from .utils import *
from .loss import get_loss
from .regularizer import get_regularizer
