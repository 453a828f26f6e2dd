"""Deterministic 64-bit mixing used for hashed page placement and seeding."""

MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    """One splitmix64 step applied to ``x``, returned as an unsigned 64-bit value.

    Matches the published reference sequence: splitmix64(0) == 0xE220A8397B1DCDAF.
    """
    z = (x + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return (z ^ (z >> 31)) & MASK64
