"""Tabulate the two-photon coincidence dip against relative delay."""
import numpy as np

from loqec import hom_scan

COHERENCE_TIME = 1.0e-12
SPAN_SIGMAS = 3.0
POINTS = 25


def main():
    delays = np.linspace(-SPAN_SIGMAS, SPAN_SIGMAS, POINTS) * COHERENCE_TIME
    result = hom_scan(delays, COHERENCE_TIME)
    print(f"coherence time {COHERENCE_TIME:.3g} s, {POINTS} delay points")
    print(f"{'delay (s)':>12}  {'overlap':>8}  {'P(coinc)':>9}")
    for point in result.points:
        marker = "  <- dip floor" if point.p_coincidence < 1e-12 else ""
        print(f"{point.delay:>12.3e}  {point.overlap:>8.4f}  {point.p_coincidence:>9.5f}{marker}")


if __name__ == "__main__":
    main()
