"""Presence-only model of the L1 instruction cache and the unified L2 for
64-byte instruction blocks, carrying the per-block hint bit that gates
PC-indexed table probes and firing the L2-to-L1i migration trigger."""

from __future__ import annotations

from .assoc import SetAssocArray

#: fetch_block outcomes
L1I_HIT = 0
L2_FILL = 1
MEM_FILL = 2


class _BlockInfo:
    """Per-resident-block metadata; the bit dies with the block's eviction."""

    __slots__ = ("apt",)

    def __init__(self, apt: bool = False):
        self.apt = apt


class BlockDirectory:
    """L1i/L2 block residency with one hint (APT) bit per block per level.

    The default geometry is a 32KB 8-way L1i and a 512KB 8-way L2, both with
    64-byte blocks.  Fills go to both levels; evictions are independent (no
    inclusion is enforced).  The hint bits are just that, hints: a set bit
    with no surviving table entries must only cost a fruitless probe.
    """

    def __init__(self, l1i_blocks: int = 512, l1i_ways: int = 8,
                 l2_blocks: int = 8192, l2_ways: int = 8):
        self.l1i = SetAssocArray(l1i_blocks // l1i_ways, l1i_ways)
        self.l2 = SetAssocArray(l2_blocks // l2_ways, l2_ways)

    def fetch_block(self, block_addr: int) -> tuple[int, bool]:
        """Fetch one instruction block; returns (outcome, hint bit).

        L1i hit: (L1I_HIT, that block's L1i hint bit).  L1i miss with L2 hit:
        the block is filled into the L1i with a clear hint bit and the L2's
        hint bit is returned so the caller can run migration, (L2_FILL, bit).
        Both miss: filled into both levels, (MEM_FILL, False).
        """
        info = self.l1i.lookup(block_addr, touch=True)
        if info is not None:
            return L1I_HIT, info.apt
        l2_info = self.l2.lookup(block_addr, touch=True)
        if l2_info is not None:
            self.l1i.insert(block_addr, _BlockInfo())
            return L2_FILL, l2_info.apt
        self.l2.insert(block_addr, _BlockInfo())
        self.l1i.insert(block_addr, _BlockInfo())
        return MEM_FILL, False

    def _level(self, level: str) -> SetAssocArray:
        if level == "l1i":
            return self.l1i
        if level == "l2":
            return self.l2
        raise ValueError(f"unknown cache level: {level!r}")

    def set_apt(self, level: str, block_addr: int) -> bool:
        """Set the hint bit if the block is resident at that level."""
        info = self._level(level).lookup(block_addr, touch=False)
        if info is None:
            return False
        info.apt = True
        return True

    def is_resident(self, level: str, block_addr: int) -> bool:
        return self._level(level).lookup(block_addr, touch=False) is not None

    def apt_bit(self, level: str, block_addr: int):
        """Hint bit of a resident block, or None if not resident."""
        info = self._level(level).lookup(block_addr, touch=False)
        return None if info is None else info.apt

    def clear_apt_bits(self) -> None:
        """Drop every hint bit at both levels; residency is untouched."""
        for arr in (self.l1i, self.l2):
            for _, info, _, _ in arr.items():
                info.apt = False
