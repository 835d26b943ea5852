"""End-to-end experiment pipelines: encoding sweeps, fits, HOM scans.

The sweep pipeline mirrors the bench: a half-wave plate prepares the input
qubit from |H>, a polarizing beam splitter entangles it with the ancilla
under coincidence post-selection, the fiber wiring routes the pair to the
analyzer arm C and the Z-measurement arm D, and the optional Pockels cell
undoes the heralded bit flip before the analyzer.

Overlap convention: ``ExperimentConfig.overlap_v`` is the degree of
indistinguishability on the probability scale, i.e. the weight of the
interfering (temporally matched) component in the detected ensemble.  It
equals the fringe visibility of the heralded analyzer curves and enters
state preparation as an amplitude overlap of sqrt(overlap_v).  The HOM
scan, which measures amplitude overlaps directly, uses
:class:`~loqec.state_core.DistinguishabilitySpec` unchanged.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .detection import (
    AnalyzerCurves,
    FeedForwardRule,
    analyzer_curve,
    apply_feedforward,
    coincidence_postselect,
    z_measure,
)
from .elements import (
    PATH_A,
    PATH_ANCILLA_IN,
    PATH_B,
    PATH_C,
    PATH_D,
    PATH_QUBIT_IN,
    WiringConfig,
    bs5050,
    delay,
    hwp,
    pbs,
    rewire,
)
from .errors import FitError, ValidationError
from .state_core import (
    DistinguishabilitySpec,
    SinglePhotonSpec,
    TwoPhotonState,
    apply_element,
    computational_jones,
    jones_to_computational,
    product_state,
)

#: Default analyzer grid: -90 to 90 degrees in 10 degree steps.
DEFAULT_THETAS = tuple(float(t) for t in range(-90, 91, 10))

_HOM_IN1 = "hom-in-1"
_HOM_IN2 = "hom-in-2"
_HOM_OUT1 = "hom-out-1"
_HOM_OUT2 = "hom-out-2"


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything one sweep needs, in bench units (degrees, Hz, seconds)."""

    qubit_hwp_angle: float = 22.5
    wiring: WiringConfig = WiringConfig.A_TO_C_B_TO_D
    overlap_v: float = 1.0
    imperfection_eps: float = 0.0
    pc_enabled: bool = True
    thetas: tuple[float, ...] = DEFAULT_THETAS
    pair_rate: float = 1000.0
    duration: float = 60.0
    seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "qubit_hwp_angle", float(self.qubit_hwp_angle))
        if not isinstance(self.wiring, WiringConfig):
            object.__setattr__(self, "wiring", WiringConfig.parse(self.wiring))
        for name in ("overlap_v", "imperfection_eps"):
            value = float(getattr(self, name))
            if not 0.0 <= value <= 1.0:
                raise ValidationError(f"{name} must lie in [0, 1], got {value!r}")
            object.__setattr__(self, name, value)
        thetas = tuple(float(t) for t in self.thetas)
        if not thetas:
            raise ValidationError("thetas must contain at least one angle")
        object.__setattr__(self, "thetas", thetas)
        for name in ("pair_rate", "duration"):
            value = float(getattr(self, name))
            if value < 0.0 or not math.isfinite(value):
                raise ValidationError(f"{name} must be finite and >= 0, got {value!r}")
            object.__setattr__(self, name, value)
        object.__setattr__(self, "seed", int(self.seed))


@dataclass(frozen=True)
class MalusFit:
    """Least-squares parameters of ``offset + amplitude * cos(2(theta - phase))``."""

    offset: float
    amplitude: float
    phase_deg: float


@dataclass(frozen=True)
class CurveResult:
    """One heralded analyzer curve with its fit and derived visibility."""

    probabilities: tuple[float, ...]
    counts: tuple[int, ...] | None
    fit: MalusFit
    visibility: float


@dataclass(frozen=True)
class SweepResult:
    """Full output of one analyzer sweep."""

    config: ExperimentConfig
    thetas: tuple[float, ...]
    d1_d2: CurveResult
    d1_d3: CurveResult
    success_probability: float
    discarded_probability: float
    expected_state: int
    fidelity_45: float
    fidelity_fit: float


def encode_qubit(
    alpha: complex, beta: complex, overlap_v: float = 1.0
) -> tuple[TwoPhotonState, float]:
    """Entangle a qubit with the |0> ancilla on the encoding beam splitter.

    ``(alpha, beta)`` are the computational-basis coefficients of the input
    photon; ``overlap_v`` is the probability-scale indistinguishability of
    the photon pair (see the module docstring).  Returns the coincidence
    post-selected two-photon state on output arms A and B together with the
    success probability, which is exactly one half for any normalized
    input.
    """
    alpha = complex(alpha)
    beta = complex(beta)
    norm = abs(alpha) ** 2 + abs(beta) ** 2
    if abs(norm - 1.0) > 1e-12:
        raise ValidationError(f"qubit coefficients must be normalized, got norm^2 {norm!r}")
    if not 0.0 <= float(overlap_v) <= 1.0:
        raise ValidationError(f"overlap_v must lie in [0, 1], got {overlap_v!r}")
    amp_overlap = math.sqrt(float(overlap_v))
    residual = math.sqrt(max(0.0, 1.0 - amp_overlap * amp_overlap))

    zero, one = computational_jones(0), computational_jones(1)
    qubit_jones = (
        alpha * zero[0] + beta * one[0],
        alpha * zero[1] + beta * one[1],
    )
    qubit = SinglePhotonSpec(PATH_QUBIT_IN, qubit_jones, (1.0 + 0j,))
    ancilla = SinglePhotonSpec(
        PATH_ANCILLA_IN, computational_jones(0), (amp_overlap + 0j, residual + 0j)
    )
    state = product_state(qubit, ancilla, paths=(PATH_A, PATH_B))
    state = apply_element(state, pbs(PATH_QUBIT_IN, PATH_ANCILLA_IN, PATH_A, PATH_B))
    return coincidence_postselect(state)


def _input_coefficients(hwp_angle_deg: float) -> tuple[complex, complex]:
    """Computational coefficients of |H> after the preparation wave plate."""
    plate = hwp(hwp_angle_deg, PATH_QUBIT_IN)
    jones = (complex(plate.matrix[0, 0]), complex(plate.matrix[1, 0]))
    return jones_to_computational(jones)


def _admix(probabilities: Sequence[float], mean: float, eps: float) -> tuple[float, ...]:
    """Mix a flat background of the curve's own period mean into each point."""
    return tuple((1.0 - eps) * p + eps * mean for p in probabilities)


def run_analytic(config: ExperimentConfig) -> SweepResult:
    """Run the sweep with exact probabilities (no counting noise)."""
    alpha, beta = _input_coefficients(config.qubit_hwp_angle)
    state, p_success = encode_qubit(alpha, beta, config.overlap_v)
    state = rewire(state, config.wiring)
    branches = z_measure(state, PATH_D)
    branches = apply_feedforward(branches, FeedForwardRule(), config.pc_enabled)

    curves = analyzer_curve(branches, config.thetas)
    # Cardinal angles: period means from (0, 90), fidelity points at (45, -45).
    cardinal = analyzer_curve(branches, (0.0, 90.0, 45.0, -45.0))
    mean_d2 = 0.5 * (cardinal.p_d1_d2[0] + cardinal.p_d1_d2[1])
    mean_d3 = 0.5 * (cardinal.p_d1_d3[0] + cardinal.p_d1_d3[1])

    eps = config.imperfection_eps
    p_d2 = _admix(curves.p_d1_d2, mean_d2, eps)
    p_d3 = _admix(curves.p_d1_d3, mean_d3, eps)

    fit_d2 = fit_malus(config.thetas, p_d2)
    fit_d3 = fit_malus(config.thetas, p_d3)
    vis_d2 = visibility(fit_d2)
    vis_d3 = visibility(fit_d3)

    expected = 0 if abs(alpha) >= abs(beta) else 1
    plus45, minus45 = _admix(cardinal.p_d1_d2[2:4], mean_d2, eps)
    fid_45 = fidelity_45(plus45, minus45, expected)
    fid_fit = 0.5 * (1.0 + vis_d2)

    return SweepResult(
        config=config,
        thetas=curves.thetas,
        d1_d2=CurveResult(p_d2, None, fit_d2, vis_d2),
        d1_d3=CurveResult(p_d3, None, fit_d3, vis_d3),
        success_probability=p_success,
        discarded_probability=1.0 - p_success,
        expected_state=expected,
        fidelity_45=fid_45,
        fidelity_fit=fid_fit,
    )


def run_experiment(config: ExperimentConfig) -> SweepResult:
    """Run the sweep and attach Poisson coincidence counts to both curves."""
    result = run_analytic(config)
    counts_d2 = sample_counts(
        result.d1_d2.probabilities, config.pair_rate, config.duration, config.seed, stream=0
    )
    counts_d3 = sample_counts(
        result.d1_d3.probabilities, config.pair_rate, config.duration, config.seed, stream=1
    )
    return dataclasses.replace(
        result,
        d1_d2=dataclasses.replace(result.d1_d2, counts=tuple(int(c) for c in counts_d2)),
        d1_d3=dataclasses.replace(result.d1_d3, counts=tuple(int(c) for c in counts_d3)),
    )


def sample_counts(
    probabilities: Sequence[float],
    pair_rate: float,
    duration: float,
    seed: int,
    *,
    stream: int = 0,
) -> np.ndarray:
    """Poisson coincidence counts for a probability grid, reproducibly.

    Each grid point draws from its own counter-based generator keyed by
    ``(seed, point index, stream)``, so results do not depend on evaluation
    order and distinct curves of one run stay decorrelated via ``stream``.
    """
    p = np.asarray(probabilities, dtype=float)
    if p.ndim != 1:
        raise ValidationError(f"probabilities must be one-dimensional, got shape {p.shape}")
    if p.size and (p.min() < 0.0 or p.max() > 1.0):
        raise ValidationError("probabilities must lie in [0, 1]")
    rate = float(pair_rate)
    time = float(duration)
    if rate < 0.0 or time < 0.0 or not (math.isfinite(rate) and math.isfinite(time)):
        raise ValidationError("pair_rate and duration must be finite and >= 0")
    key = int(seed) & (2**64 - 1)
    means = rate * time * p
    counts = np.empty(p.size, dtype=np.int64)
    for index, mean in enumerate(means):
        bits = np.random.Philox(key=key, counter=[0, index, int(stream), 0])
        counts[index] = np.random.Generator(bits).poisson(mean)
    return counts


def fit_malus(thetas: Sequence[float], values: Sequence[float]) -> MalusFit:
    """Least-squares fit of a fixed-period analyzer curve.

    The model is ``offset + amplitude * cos(2(theta - phase))``, linearized
    on the basis ``{1, cos(2 theta), sin(2 theta)}``.  The returned
    amplitude is nonnegative and the phase lies in (-90, 90] degrees.
    """
    th = np.asarray(thetas, dtype=float)
    y = np.asarray(values, dtype=float)
    if th.ndim != 1 or th.shape != y.shape:
        raise FitError(f"angle and value grids must match, got {th.shape} and {y.shape}")
    if np.unique(th).size < 3:
        raise FitError(f"need at least 3 distinct angles, got {np.unique(th).size}")
    angles = np.deg2rad(2.0 * th)
    design = np.column_stack([np.ones_like(angles), np.cos(angles), np.sin(angles)])
    coeffs, _, rank, _ = np.linalg.lstsq(design, y, rcond=None)
    if rank < 3:
        raise FitError(
            "analyzer grid is rank-deficient for a fixed-period fit "
            "(angles congruent modulo 90 degrees?)"
        )
    offset, c, s = (float(x) for x in coeffs)
    amplitude = math.hypot(c, s)
    phase_rad = 0.5 * math.atan2(s, c)
    phase_deg = math.degrees(phase_rad)
    if phase_deg <= -90.0:
        phase_deg += 180.0
    return MalusFit(offset, amplitude, phase_deg)


def visibility(fit: MalusFit) -> float:
    """Fringe visibility amplitude/offset of a fitted analyzer curve."""
    if fit.offset <= 0.0:
        raise ValidationError(f"visibility undefined for offset {fit.offset!r}")
    return fit.amplitude / fit.offset


def fidelity_45(p_plus45: float, p_minus45: float, expected_state: int) -> float:
    """Fidelity of the surviving qubit from the two cardinal analyzer points.

    The +45 degree analyzer passes computational |0>, the -45 degree one
    passes |1>; the fidelity is the correct-outcome fraction of the two
    coincidence probabilities.
    """
    if expected_state not in (0, 1):
        raise ValidationError(f"expected_state must be 0 or 1, got {expected_state!r}")
    if p_plus45 < 0.0 or p_minus45 < 0.0:
        raise ValidationError("cardinal probabilities must be nonnegative")
    total = p_plus45 + p_minus45
    if total == 0.0:
        raise ValidationError("fidelity undefined: both cardinal probabilities vanish")
    correct = p_plus45 if expected_state == 0 else p_minus45
    return correct / total


@dataclass(frozen=True)
class HomScanPoint:
    """One delay setting of the two-photon interference scan."""

    delay: float
    overlap: float
    p_coincidence: float


@dataclass(frozen=True)
class HomScanResult:
    """Coincidence dip of two |H> photons on a 50/50 beam splitter."""

    coherence_time: float
    points: tuple[HomScanPoint, ...]


def hom_scan(delays: Sequence[float], coherence_time: float) -> HomScanResult:
    """Two-photon coincidence probability versus relative delay.

    Each point prepares two horizontally polarized photons, delays one by
    ``tau`` (Gaussian wavepackets of coherence time ``sigma``, amplitude
    overlap ``exp(-tau^2 / 2 sigma^2)``), interferes them on a 50/50 beam
    splitter, and records the probability of a coincidence across the two
    outputs.  Zero delay gives zero coincidences; far beyond the coherence
    time the classical value one half is recovered.
    """
    grid = tuple(float(t) for t in delays)
    if not grid:
        raise ValidationError("delay grid must contain at least one value")
    sigma = float(coherence_time)
    if sigma <= 0.0:
        raise ValidationError(f"coherence time must be positive, got {sigma!r}")
    splitter = bs5050(_HOM_IN1, _HOM_IN2, _HOM_OUT1, _HOM_OUT2)
    horizontal = (1.0 + 0j, 0j)
    points = []
    for tau in grid:
        spec = DistinguishabilitySpec.from_delay(tau, sigma)
        first = SinglePhotonSpec(_HOM_IN1, horizontal)
        second = SinglePhotonSpec(_HOM_IN2, horizontal)
        state = product_state(first, second, paths=(_HOM_OUT1, _HOM_OUT2))
        state = delay(_HOM_IN1, spec)(state)
        state = apply_element(state, splitter)
        _, p_coincidence = coincidence_postselect(state)
        points.append(HomScanPoint(tau, spec.overlap, p_coincidence))
    return HomScanResult(sigma, tuple(points))
