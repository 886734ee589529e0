"""Reproducible sample points from a SplitMix64 stream."""

MASK64 = (1 << 64) - 1


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def uniform(self) -> float:
        """Uniform double in [0, 1) from the top 53 bits."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))


def sample_box(domain, count, seed, margin=0.0):
    """``count`` points drawn uniformly from the box, coordinates in declaration order.

    ``margin`` shrinks each interval by that fraction of its width at both ends.
    """
    rng = SplitMix64(seed)
    out = []
    for _ in range(count):
        p = []
        for lo, hi in domain:
            pad = margin * (hi - lo)
            a, b = lo + pad, hi - pad
            p.append(a + (b - a) * rng.uniform())
        out.append(tuple(p))
    return out
