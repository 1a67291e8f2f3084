"""Semi-supervised GAN for device-free CSI fingerprint localization.

Thin Python surface over the C++ core: differentiable layers, the
generator / shared-weight discriminator-classifier pair, the synthetic
dataset, and the training loop.
"""

from ._core import (  # noqa: F401
    AdamHyper,
    AdamState,
    ClassifyResult,
    ConvKernelBank,
    DatasetSplit,
    DenseParams,
    DiscClassNet,
    EpochStats,
    Generator,
    GeneratorNet,
    SimplifiedGeneratorNet,
    SynthParams,
    TrainConfig,
    TrainResult,
    adam_step,
    binary_ce,
    build_discriminator,
    build_generator,
    build_simplified_generator,
    categorical_ce,
    conv1d_forward,
    deconv1d_forward,
    dense_forward,
    evaluate_accuracy,
    grad_check,
    lambda_real_prob,
    leaky_relu,
    load_csv,
    load_discriminator,
    load_generator,
    normalize,
    relu,
    save_csv,
    save_discriminator,
    save_generator,
    select_labeled_subset,
    softmax,
    synth_generate,
    tanh_act,
    train,
    transpose_bank,
)

__all__ = [name for name in dir() if not name.startswith("_")]
