from src.autodiff.tensor import Tensor, Tape, ShapeError, NonFiniteError
from src.autodiff.optim import Adam, AdamState, adam_step
from src.autodiff.gradcheck import GradCheckReport, grad_check
