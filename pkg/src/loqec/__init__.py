"""Desk-scale simulator of a two-photon error-corrected polarization qubit.

The package models the full bench: qubit preparation with a half-wave
plate, entangling encoding on a polarizing beam splitter under
coincidence-basis post-selection, deliberate Z measurement of one photon,
and feed-forward recovery of the survivor with a Pockels cell, read out by
analyzer sweeps and two-photon interference scans.
"""
from .detection import (
    ANALYZER_DETECTOR,
    AnalyzerCurves,
    DetectorSpec,
    FeedForwardRule,
    MeasurementBranch,
    Z_VALUE0_DETECTOR,
    Z_VALUE1_DETECTOR,
    analyzer_curve,
    apply_feedforward,
    coincidence_postselect,
    z_detectors,
    z_measure,
)
from .elements import (
    PATH_A,
    PATH_ANCILLA_IN,
    PATH_B,
    PATH_C,
    PATH_D,
    PATH_QUBIT_IN,
    LinearElement,
    WiringConfig,
    bs5050,
    delay,
    hwp,
    pbs,
    pockels,
    rewire,
)
from .errors import (
    ConfigurationError,
    FitError,
    LoqecError,
    ManifestError,
    StructureError,
    UsageError,
    ValidationError,
)
from .experiment import (
    DEFAULT_THETAS,
    CurveResult,
    ExperimentConfig,
    HomScanPoint,
    HomScanResult,
    MalusFit,
    SweepResult,
    encode_qubit,
    fidelity_45,
    fit_malus,
    hom_scan,
    run_analytic,
    run_experiment,
    sample_counts,
    visibility,
)
from .state_core import (
    AMPLITUDE_TOL,
    ConditionalEnsemble,
    DistinguishabilitySpec,
    EnsembleMember,
    ModeLabel,
    Polarization,
    PolarizationProjector,
    SinglePhotonSpec,
    SinglePhotonState,
    TwoPhotonState,
    analyzer_jones,
    analyzer_projector,
    apply_element,
    apply_element_single,
    computational_jones,
    computational_projector,
    condition_on,
    joint_probability,
    jones_to_computational,
    product_state,
    relabel_paths,
)

__all__ = [
    "AMPLITUDE_TOL",
    "ANALYZER_DETECTOR",
    "AnalyzerCurves",
    "ConditionalEnsemble",
    "ConfigurationError",
    "CurveResult",
    "DEFAULT_THETAS",
    "DetectorSpec",
    "DistinguishabilitySpec",
    "EnsembleMember",
    "ExperimentConfig",
    "FeedForwardRule",
    "FitError",
    "HomScanPoint",
    "HomScanResult",
    "LinearElement",
    "LoqecError",
    "MalusFit",
    "ManifestError",
    "MeasurementBranch",
    "ModeLabel",
    "PATH_A",
    "PATH_ANCILLA_IN",
    "PATH_B",
    "PATH_C",
    "PATH_D",
    "PATH_QUBIT_IN",
    "Polarization",
    "PolarizationProjector",
    "SinglePhotonSpec",
    "SinglePhotonState",
    "StructureError",
    "SweepResult",
    "TwoPhotonState",
    "UsageError",
    "ValidationError",
    "WiringConfig",
    "Z_VALUE0_DETECTOR",
    "Z_VALUE1_DETECTOR",
    "analyzer_curve",
    "analyzer_jones",
    "analyzer_projector",
    "apply_element",
    "apply_element_single",
    "apply_feedforward",
    "bs5050",
    "coincidence_postselect",
    "computational_jones",
    "computational_projector",
    "condition_on",
    "delay",
    "encode_qubit",
    "fidelity_45",
    "fit_malus",
    "hom_scan",
    "hwp",
    "joint_probability",
    "jones_to_computational",
    "pbs",
    "pockels",
    "product_state",
    "relabel_paths",
    "rewire",
    "run_analytic",
    "run_experiment",
    "sample_counts",
    "visibility",
    "z_detectors",
    "z_measure",
]
