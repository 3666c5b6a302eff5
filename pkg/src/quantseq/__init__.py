"""quantseq: hybrid quantum-classical classification of image-frame sequences.

Frames are amplitude-encoded into simulated qubit registers, convolved by a
tensor-network variational circuit (MPS, reverse MERA, or TTN), and the
per-frame measured expectations drive an LSTM with a sigmoid readout.  The
package also ships the full experimental harness: synthetic data generation,
stratified cross-validation training, noise and qubit-count sweeps, and
cross-model statistics.
"""

from .ansatz import (
    CircuitOp,
    CircuitSpec,
    build,
    build_mps,
    build_reverse_mera,
    build_ttn,
    run_circuit,
)
from .autodiff import circuit_gradient, finite_diff_gradient, hybrid_chain, shift_rule_partial
from .datagen import DatasetManifest, SynthConfig, generate, load_manifest
from .gates import arbitrary_unitary, cnot, ising_xx, ising_yy, ising_zz, u3
from .metrics import MetricsReport, compute_report, levene_test, paired_ttest, roc_auc
from .noise import NoiseConfig, density_matrix_expectation, kraus_ops, noisy_expectation
from .pipeline import (
    HybridModel,
    PatientSequence,
    TrainConfig,
    evaluate,
    forward,
    init_model,
    load_checkpoint,
    load_dataset,
    save_checkpoint,
    split_dataset,
    stratified_kfold,
    train_fold,
)
from .statevector import (
    QuantumState,
    amplitude_encode,
    apply_1q,
    apply_2q,
    expectation_z,
    prob_one,
    sample_shots,
)

__version__ = "0.1.0"

__all__ = [
    "CircuitOp",
    "CircuitSpec",
    "DatasetManifest",
    "HybridModel",
    "MetricsReport",
    "NoiseConfig",
    "PatientSequence",
    "QuantumState",
    "SynthConfig",
    "TrainConfig",
    "amplitude_encode",
    "apply_1q",
    "apply_2q",
    "arbitrary_unitary",
    "build",
    "build_mps",
    "build_reverse_mera",
    "build_ttn",
    "circuit_gradient",
    "cnot",
    "compute_report",
    "density_matrix_expectation",
    "evaluate",
    "expectation_z",
    "finite_diff_gradient",
    "forward",
    "generate",
    "hybrid_chain",
    "init_model",
    "ising_xx",
    "ising_yy",
    "ising_zz",
    "kraus_ops",
    "levene_test",
    "load_checkpoint",
    "load_dataset",
    "load_manifest",
    "noisy_expectation",
    "paired_ttest",
    "prob_one",
    "roc_auc",
    "run_circuit",
    "sample_shots",
    "save_checkpoint",
    "shift_rule_partial",
    "split_dataset",
    "stratified_kfold",
    "train_fold",
    "u3",
]
