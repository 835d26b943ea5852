"""Detectors, post-selection, Z measurement, feed-forward, analyzer curves.

Detector roles follow the bench layout: D1 sits behind the analyzer on arm
C; the Z-measurement station on arm D splits the computational basis onto
D2 (value 0) and D3 (value 1).  A D3 click heralds the encoded bit flip and
triggers the Pockels correction on arm C.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable, Sequence

from .elements import PATH_C, pockels
from .errors import ConfigurationError, ValidationError
from .state_core import (
    Jones,
    PolarizationProjector,
    SinglePhotonState,
    TwoPhotonState,
    _component,
    analyzer_jones,
    apply_element_single,
    computational_jones,
    condition_on,
    Polarization,
)

ANALYZER_DETECTOR = "D1"
#: Z station: reflected output, heralds computational value 0.
Z_VALUE0_DETECTOR = "D2"
#: Z station: transmitted output, heralds computational value 1 (a bit flip).
Z_VALUE1_DETECTOR = "D3"

_ORTHO_TOL = 1e-12


@dataclass(frozen=True)
class DetectorSpec:
    """Single-photon detector behind a polarization filter on one path."""

    id: str
    path: str
    jones: Jones


def z_detectors(path: str) -> tuple[DetectorSpec, DetectorSpec]:
    """The standard Z-measurement detector pair on ``path``."""
    return (
        DetectorSpec(Z_VALUE0_DETECTOR, path, computational_jones(0)),
        DetectorSpec(Z_VALUE1_DETECTOR, path, computational_jones(1)),
    )


def _check_measurement_pair(pair: Sequence[DetectorSpec], path: str) -> None:
    if len(pair) != 2:
        raise ConfigurationError(f"a Z measurement needs exactly two detectors, got {len(pair)}")
    first, second = pair
    if first.path != path or second.path != path:
        raise ConfigurationError(
            f"detectors {first.id!r}/{second.id!r} must both sit on path {path!r}"
        )
    if first.id == second.id:
        raise ConfigurationError(f"detector ids must differ, both are {first.id!r}")
    inner = sum(
        _component(first.jones, pol).conjugate() * _component(second.jones, pol)
        for pol in Polarization
    )
    if abs(inner) > _ORTHO_TOL:
        raise ConfigurationError(
            f"detector projections must be orthogonal, overlap {abs(inner):.3e}"
        )
    # Two orthogonal unit vectors in a two-dimensional space are complete.


@dataclass(frozen=True)
class MeasurementBranch:
    """One outcome of the Z measurement: detector, temporal index, remainder."""

    detector: str
    temporal: int
    probability: float
    conditional: SinglePhotonState


def z_measure(
    state: TwoPhotonState,
    path: str,
    detectors: Sequence[DetectorSpec] | None = None,
) -> tuple[MeasurementBranch, ...]:
    """Destructively measure the photon on ``path`` in the detector basis.

    Returns one branch per (detector, temporal index) with nonzero weight.
    Branch probabilities sum to the squared norm of the input state, so a
    subnormalized post-selected state yields branch weights on the same
    scale.
    """
    pair = tuple(detectors) if detectors is not None else z_detectors(path)
    _check_measurement_pair(pair, path)
    branches = []
    for det in pair:
        ensemble = condition_on(state, PolarizationProjector(det.path, det.jones))
        for member in ensemble.members:
            branches.append(
                MeasurementBranch(
                    det.id, member.measured_temporal, member.state.norm_squared, member.state
                )
            )
    return tuple(branches)


@dataclass(frozen=True)
class FeedForwardRule:
    """Which detector click fires the Pockels cell, and on which path."""

    trigger: str = Z_VALUE1_DETECTOR
    pockels_path: str = PATH_C


def apply_feedforward(
    branches: Iterable[MeasurementBranch],
    rule: FeedForwardRule,
    enabled: bool,
) -> tuple[MeasurementBranch, ...]:
    """Fire the Pockels correction on every branch matching the trigger.

    The correction is unitary, so branch probabilities are untouched; with
    ``enabled=False`` the branches pass through unchanged.
    """
    branches = tuple(branches)
    if not enabled:
        return branches
    cell = pockels(rule.pockels_path, active=True)
    corrected = []
    for branch in branches:
        if branch.detector == rule.trigger:
            flipped = apply_element_single(branch.conditional, cell)
            corrected.append(replace(branch, conditional=flipped))
        else:
            corrected.append(branch)
    return tuple(corrected)


def coincidence_postselect(state: TwoPhotonState) -> tuple[TwoPhotonState, float]:
    """Keep only amplitudes with one photon on each of two distinct paths.

    Returns the subnormalized kept state and its squared norm, which is the
    success probability of the coincidence-basis post-selection.
    """
    kept = {
        key: amp for key, amp in state.amplitudes.items() if key[0].path != key[1].path
    }
    selected = TwoPhotonState.from_terms(kept, paths=state.paths)
    return selected, selected.norm_squared


@dataclass(frozen=True)
class AnalyzerCurves:
    """Coincidence probabilities versus analyzer angle, one curve per herald."""

    thetas: tuple[float, ...]
    p_d1_d2: tuple[float, ...]
    p_d1_d3: tuple[float, ...]


def analyzer_curve(
    branches: Iterable[MeasurementBranch], thetas: Sequence[float]
) -> AnalyzerCurves:
    """Sweep the analyzer over ``thetas`` for both heralded branch families.

    Each point is the total probability that the surviving photon passes
    the analyzer, incoherently summed over the temporal branches of the
    matching herald.
    """
    branches = tuple(branches)
    if not thetas:
        raise ValidationError("analyzer sweep needs at least one angle")
    p_d2, p_d3 = [], []
    for theta in thetas:
        jones = analyzer_jones(theta)
        total_d2 = 0.0
        total_d3 = 0.0
        for branch in branches:
            p = branch.conditional.projection_probability(jones)
            if branch.detector == Z_VALUE0_DETECTOR:
                total_d2 += p
            elif branch.detector == Z_VALUE1_DETECTOR:
                total_d3 += p
        p_d2.append(total_d2)
        p_d3.append(total_d3)
    return AnalyzerCurves(
        tuple(float(t) for t in thetas), tuple(p_d2), tuple(p_d3)
    )
