"""Float64 kernels, LSTM cell, SGD with plateau annealing, gradient checking."""

from .core import (
    DTYPE,
    check_finite,
    clip_grad_norm,
    dropout_apply,
    dropout_mask,
    glorot_uniform,
    grad_norm,
    log_sigmoid,
    logsumexp,
    make_rng,
    sgd_update,
    sigmoid,
    softmax,
)
from .gradcheck import GradCheckReport, grad_check, relative_error
from .lstm import (
    LstmCache,
    LstmCellParams,
    lstm_cell_backward,
    lstm_cell_forward,
    lstm_cell_step,
    lstm_run,
    lstm_sequence_backward,
    lstm_sequence_forward,
)
from .schedule import PlateauScheduler, SgdConfig, anneal_on_plateau
