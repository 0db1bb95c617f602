"""VAE topic model: encoder, logistic-normal latent, product-of-experts decoder."""

from cohtm.ntm.model import (
    ModelConfig,
    ModelParams,
    TopicSet,
    build_input,
    decode,
    elbo_loss,
    encode,
    extract_topics,
    infer_theta,
    init_params,
    init_prior,
    reparameterize,
)
from cohtm.ntm.train import Checkpoint, TrainingError, fit, load_checkpoint, save_checkpoint

__all__ = [
    "Checkpoint",
    "ModelConfig",
    "ModelParams",
    "TopicSet",
    "TrainingError",
    "build_input",
    "decode",
    "elbo_loss",
    "encode",
    "extract_topics",
    "fit",
    "infer_theta",
    "init_params",
    "init_prior",
    "load_checkpoint",
    "reparameterize",
    "save_checkpoint",
]
