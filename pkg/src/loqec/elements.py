"""Linear optical elements and the fiber routing between bench stages.

Every element is a unitary on a tuple of (path, polarization) channels;
matrix columns index input channels, rows index output channels.  All
constructors here produce real matrices, so no element introduces a phase
the bench does not.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Mapping

import numpy as np

from .errors import ConfigurationError, StructureError
from .state_core import (
    DistinguishabilitySpec,
    ModeLabel,
    Polarization,
    TwoPhotonState,
    _apply_label_map,
    relabel_paths,
)

#: Canonical path names used by the experiment pipeline.
PATH_QUBIT_IN = "qubit-in"
PATH_ANCILLA_IN = "ancilla-in"
PATH_A = "A"
PATH_B = "B"
PATH_C = "C"
PATH_D = "D"

_UNITARY_TOL = 1e-12

Channel = tuple[str, Polarization]


@dataclass(frozen=True)
class LinearElement:
    """Unitary acting on an ordered tuple of (path, polarization) channels."""

    name: str
    channels: tuple[Channel, ...]
    matrix: np.ndarray

    def __post_init__(self) -> None:
        mat = np.asarray(self.matrix, dtype=complex)
        n = len(self.channels)
        if mat.shape != (n, n):
            raise ConfigurationError(
                f"element {self.name!r}: matrix shape {mat.shape} does not match "
                f"{n} channels"
            )
        if len(set(self.channels)) != n:
            raise ConfigurationError(f"element {self.name!r}: duplicate channels")
        deviation = np.abs(mat.conj().T @ mat - np.eye(n)).max() if n else 0.0
        if deviation > _UNITARY_TOL:
            raise ConfigurationError(
                f"element {self.name!r}: matrix is not unitary "
                f"(deviation {float(deviation):.3e})"
            )
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)


def hwp(angle_deg: float, path: str) -> LinearElement:
    """Half-wave plate with its fast axis at ``angle_deg`` from horizontal.

    At 22.5 degrees it maps |H> onto +45 degree polarization, i.e. prepares
    computational |0> from a horizontally polarized photon.
    """
    w = math.radians(float(angle_deg))
    c, s = math.cos(2.0 * w), math.sin(2.0 * w)
    matrix = np.array([[c, s], [s, -c]], dtype=complex)
    channels = ((path, Polarization.H), (path, Polarization.V))
    return LinearElement(f"hwp[{float(angle_deg):g}]", channels, matrix)


def pbs(in1: str, in2: str, out1: str, out2: str) -> LinearElement:
    """Polarizing beam splitter: transmits H, reflects V, no extra phases.

    ``in1`` transmits to ``out1`` and reflects to ``out2``; ``in2``
    transmits to ``out2`` and reflects to ``out1``.  All four paths must be
    distinct.  The matrix also routes the reverse direction so it stays
    unitary on the full eight-channel space.
    """
    ports = (in1, in2, out1, out2)
    if len(set(ports)) != 4:
        raise ConfigurationError(f"pbs requires four distinct paths, got {ports!r}")
    channels = tuple((p, pol) for p in ports for pol in Polarization)
    index = {ch: i for i, ch in enumerate(channels)}
    matrix = np.zeros((8, 8), dtype=complex)
    links = (
        ((in1, Polarization.H), (out1, Polarization.H)),
        ((in2, Polarization.H), (out2, Polarization.H)),
        ((in1, Polarization.V), (out2, Polarization.V)),
        ((in2, Polarization.V), (out1, Polarization.V)),
    )
    for src, dst in links:
        matrix[index[dst], index[src]] = 1.0
        matrix[index[src], index[dst]] = 1.0
    return LinearElement("pbs", channels, matrix)


def bs5050(in1: str, in2: str, out1: str, out2: str) -> LinearElement:
    """Polarization-preserving 50/50 beam splitter in the real convention.

    Each polarization sees the Hadamard-type coupling
    ``(a1, a2) -> ((a1 + a2), (a1 - a2)) / sqrt(2)``, the sign landing on
    the ``in2 -> out2`` transfer.
    """
    ports = (in1, in2, out1, out2)
    if len(set(ports)) != 4:
        raise ConfigurationError(f"bs5050 requires four distinct paths, got {ports!r}")
    channels = tuple((p, pol) for p in ports for pol in Polarization)
    index = {ch: i for i, ch in enumerate(channels)}
    matrix = np.zeros((8, 8), dtype=complex)
    r = 1.0 / math.sqrt(2.0)
    for pol in Polarization:
        block = (
            ((in1, pol), (out1, pol), r),
            ((in2, pol), (out1, pol), r),
            ((in1, pol), (out2, pol), r),
            ((in2, pol), (out2, pol), -r),
        )
        for src, dst, coeff in block:
            matrix[index[dst], index[src]] = coeff
            matrix[index[src], index[dst]] = coeff
    return LinearElement("bs5050", channels, matrix)


def pockels(path: str, active: bool) -> LinearElement:
    """Pockels cell with fast axis horizontal: H -> H, V -> -V when active.

    On the computational basis the active cell exchanges |0> and |1>, which
    is exactly the bit-flip correction the feed-forward stage needs.  When
    inactive it is the identity.
    """
    matrix = np.diag([1.0, -1.0 if active else 1.0]).astype(complex)
    channels = ((path, Polarization.H), (path, Polarization.V))
    return LinearElement(f"pockels[{'on' if active else 'off'}]", channels, matrix)


def delay(path: str, spec: DistinguishabilitySpec) -> Callable[[TwoPhotonState], TwoPhotonState]:
    """Temporal delay stage on one path, parameterized by amplitude overlap.

    Returns a transform that rotates the two-element temporal basis of
    every mode on ``path``: index 0 goes to ``v * e0 + sqrt(1 - v^2) * e1``.
    With ``v = 1`` the transform is the exact identity; with ``v = 0`` the
    wavepacket moves entirely to temporal index 1.  Apply it before the
    photons interfere; afterwards a shared delay is just a relabeling.
    """
    v = spec.overlap
    w = math.sqrt(max(0.0, 1.0 - v * v))
    rotation = ((v, -w), (w, v))

    def transform(state: TwoPhotonState) -> TwoPhotonState:
        def expand(label: ModeLabel) -> tuple[tuple[ModeLabel, complex], ...]:
            if label.path != path:
                return ((label, 1.0 + 0j),)
            if label.temporal > 1:
                raise StructureError(
                    f"delay stage supports temporal indices 0 and 1, "
                    f"found {label.temporal} on path {path!r}"
                )
            col = label.temporal
            return tuple(
                (ModeLabel(label.path, label.pol, row), complex(rotation[row][col]))
                for row in (0, 1)
                if rotation[row][col] != 0.0
            )

        return _apply_label_map(state, expand)

    return transform


class WiringConfig(Enum):
    """Fiber routing from encoder outputs A, B to analyzer arm C and Z arm D.

    The two members are the two ways of plugging the pair of fibers; the
    swap is a pure relabeling, so both produce identical statistics once
    detector roles are fixed by arm.
    """

    A_TO_C_B_TO_D = "A:C,B:D"
    A_TO_D_B_TO_C = "A:D,B:C"

    @property
    def mapping(self) -> Mapping[str, str]:
        """Bidirectional path swap realized by plugging the two fibers."""
        if self is WiringConfig.A_TO_C_B_TO_D:
            return {PATH_A: PATH_C, PATH_C: PATH_A, PATH_B: PATH_D, PATH_D: PATH_B}
        return {PATH_A: PATH_D, PATH_D: PATH_A, PATH_B: PATH_C, PATH_C: PATH_B}

    @classmethod
    def parse(cls, text: str) -> "WiringConfig":
        cleaned = str(text).replace(" ", "")
        for member in cls:
            if member.value == cleaned:
                return member
        valid = ", ".join(repr(m.value) for m in cls)
        raise ConfigurationError(f"unknown wiring {text!r}; expected one of {valid}")


def rewire(state: TwoPhotonState, wiring: WiringConfig) -> TwoPhotonState:
    """Relabel encoder output paths through the configured fiber swap.

    Applying the same rewiring twice restores the original labels.
    """
    return relabel_paths(state, wiring.mapping)
