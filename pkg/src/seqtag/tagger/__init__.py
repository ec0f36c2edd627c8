"""BiLSTM-CRF sequence tagger: CRF inference, BiLSTM encoder, training, prediction."""

from .bilstm import bilstm_backward, bilstm_encode
from .crf import (
    CrfParams,
    apply_structural_mask,
    crf_log_partition,
    crf_marginals,
    crf_nll_and_gradients,
    crf_sequence_score,
    viterbi_decode,
)
from .model import MODEL_FORMAT, LabelScheme, TaggerModel, TrainConfig, document_sentences, predict_document
from .train import evaluate_prepared, prepare_documents, train_tagger
