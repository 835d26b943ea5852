"""Brute-force references the test suite checks the package against.

Nothing here reuses the package's state algebra.  Two-photon transitions
are computed with the permanent formula for bosonic matrix elements, and
the encoder's heralded analyzer curves come from enumerating the four
post-selected creation terms by hand.
"""
from __future__ import annotations

import math
from collections import defaultdict

_R = 1.0 / math.sqrt(2.0)


def expand_two_photon(amplitudes, transfer):
    """Two-photon transition amplitudes via the permanent formula.

    ``amplitudes`` maps canonically ordered label pairs to coefficients of
    normalized pair states.  ``transfer`` maps an input label to its
    single-photon output row ``{label: coefficient}``; labels without a row
    pass through unchanged.  For output pair (o1, o2) and input pair
    (i1, i2) the matrix element is

        perm([[U[o1,i1], U[o1,i2]], [U[o2,i1], U[o2,i2]]]) / sqrt(m_out * m_in)

    with multiplicities m = 2 for a doubly occupied pair and 1 otherwise.
    """
    out: dict = defaultdict(complex)
    for (i1, i2), amp in amplitudes.items():
        row1 = dict(transfer.get(i1, {i1: 1.0 + 0j}))
        row2 = dict(transfer.get(i2, {i2: 1.0 + 0j}))
        if i1 == i2:
            amp = amp / math.sqrt(2.0)
        targets = sorted(set(row1) | set(row2))
        for a, o1 in enumerate(targets):
            for o2 in targets[a:]:
                perm = row1.get(o1, 0j) * row2.get(o2, 0j) + row1.get(o2, 0j) * row2.get(o1, 0j)
                if o1 == o2:
                    perm = perm / math.sqrt(2.0)
                if perm != 0:
                    out[(o1, o2)] += amp * perm
    return {key: value for key, value in out.items() if abs(value) > 1e-15}


def element_transfer(element, labels):
    """Single-photon transfer rows of a package element for given labels."""
    from loqec import ModeLabel

    columns = {channel: j for j, channel in enumerate(element.channels)}
    transfer = {}
    for label in labels:
        col = columns.get((label.path, label.pol))
        if col is None:
            continue
        row = {}
        for r, (path, pol) in enumerate(element.channels):
            coeff = complex(element.matrix[r, col])
            if coeff != 0:
                row[ModeLabel(path, pol, label.temporal)] = coeff
        transfer[label] = row
    return transfer


def state_norm_squared(amplitudes) -> float:
    return float(sum(abs(a) ** 2 for a in amplitudes.values()))


def gram_schmidt_weights(wp_first, wp_second):
    """Overlap coefficient and orthogonal-residual norm of the second wavepacket."""
    n = max(len(wp_first), len(wp_second))
    a = tuple(wp_first) + (0j,) * (n - len(wp_first))
    b = tuple(wp_second) + (0j,) * (n - len(wp_second))
    overlap = sum(complex(x).conjugate() * complex(y) for x, y in zip(a, b))
    residual = math.sqrt(sum(abs(complex(y) - overlap * complex(x)) ** 2 for x, y in zip(a, b)))
    return overlap, residual


def encoder_branch_states(alpha, beta, amp_overlap, outcome, corrected=False):
    """Surviving-photon amplitudes per temporal branch of the heralded encoder.

    Enumerates the coincidence terms of the encoder directly.  The qubit
    photon (temporal 0, coefficients ``a_H``/``a_V`` in the linear basis)
    transmits H to the analyzer arm and reflects V to the Z arm; the
    ancilla (a +45 photon, temporal weights ``u`` on 0 and ``w`` on 1)
    does the opposite.  Conditioning the Z arm on outcome 0 (+45) or 1
    (-45) leaves, per measured temporal index, a pure state on the
    analyzer arm; an optional bit-flip correction negates its V component.

    Returns ``{measured_temporal: {('H'|'V', temporal): amplitude}}`` with
    weights on the half-normalized post-selected scale.
    """
    u = float(amp_overlap)
    w = math.sqrt(max(0.0, 1.0 - u * u))
    a_h = (alpha + beta) * _R
    a_v = (alpha - beta) * _R
    m_h, m_v = (_R, _R) if outcome == 0 else (_R, -_R)

    branches: dict[int, dict[tuple[str, int], complex]] = {}

    def add(measured_t, pol, analyzer_t, amp):
        if abs(amp) == 0:
            return
        branch = branches.setdefault(measured_t, {})
        key = (pol, analyzer_t)
        branch[key] = branch.get(key, 0j) + amp

    # Term family 1: qubit H on the analyzer arm, ancilla H (temporal t) on
    # the Z arm.  Term family 2: ancilla V (temporal t) on the analyzer
    # arm, qubit V (temporal 0) on the Z arm.
    for t, c_t in ((0, u), (1, w)):
        add(t, "H", 0, _R * a_h * c_t * m_h)
        add(0, "V", t, _R * a_v * c_t * m_v)

    if corrected:
        branches = {
            t: {key: (-amp if key[0] == "V" else amp) for key, amp in branch.items()}
            for t, branch in branches.items()
        }
    return branches


def encoder_curve(alpha, beta, amp_overlap, theta_deg, outcome, corrected=False):
    """Heralded coincidence probability behind the analyzer at ``theta_deg``."""
    theta = math.radians(theta_deg % 180.0)
    passed = (math.cos(theta), math.sin(theta))
    total = 0.0
    for branch in encoder_branch_states(alpha, beta, amp_overlap, outcome, corrected).values():
        groups: dict[int, complex] = defaultdict(complex)
        for (pol, analyzer_t), amp in branch.items():
            component = passed[0] if pol == "H" else passed[1]
            groups[analyzer_t] += component * amp
        total += sum(abs(g) ** 2 for g in groups.values())
    return total


def curve_formula(alpha, beta, overlap_v, theta_deg, outcome, corrected=False):
    """Closed form of the heralded analyzer curve for real input coefficients.

    ``overlap_v`` is the probability-scale indistinguishability, i.e. the
    squared amplitude overlap.
    """
    two_theta = math.radians(2.0 * theta_deg)
    sign = 1.0 if (outcome == 0 or corrected) else -1.0
    return 0.125 * (
        1.0
        + 2.0 * alpha * beta * math.cos(two_theta)
        + sign * overlap_v * (alpha * alpha - beta * beta) * math.sin(two_theta)
    )


def admixed(p, period_mean, eps):
    """Flat-background admixture applied to one curve point."""
    return (1.0 - eps) * p + eps * period_mean


def hom_coincidence(delay, coherence_time):
    """Two-photon coincidence after a 50/50 splitter for Gaussian wavepackets."""
    ratio = delay / coherence_time
    amplitude_overlap = math.exp(-0.5 * ratio * ratio)
    return 0.5 * (1.0 - amplitude_overlap**2)
