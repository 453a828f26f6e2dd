"""Conventional translation path: page-table model, 4-level walker with split
page-structure caches, the two TLB levels, and the dirty-bit store path."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Optional

from .assoc import SetAssocArray
from .counters import Counters
from .mix import splitmix64

PPN_BITS = 40
_PPN_MASK = (1 << PPN_BITS) - 1

MIN_PAGE_BITS = 12
MAX_PAGE_BITS = 21

#: Low bit of each upper page-table level's index field (x86-style, 4KB leaf).
_LEVEL_LOW_BITS = (39, 30, 21)


def vpn_of(vaddr: int, page_bits: int) -> int:
    """Virtual page number: the address right-shifted by the page size."""
    if not MIN_PAGE_BITS <= page_bits <= MAX_PAGE_BITS:
        raise ValueError(f"page_bits must be in [{MIN_PAGE_BITS}, {MAX_PAGE_BITS}]")
    return vaddr >> page_bits


@dataclass(slots=True)
class Pte:
    """A page-table entry: physical page number plus permission/Access/Dirty bits."""

    ppn: int
    readable: bool = True
    writable: bool = True
    access: bool = False
    dirty: bool = False

    def copy(self) -> "Pte":
        return replace(self)


class PageTableModel:
    """Deterministic VPN-to-PPN oracle with mutable Access/Dirty bits.

    The mapping is a pure function of (vpn, seed, mode): identity mode maps a
    page to itself (masked to the physical range), hashed mode scatters pages
    with splitmix64.  Only the per-page Access/Dirty bits are mutable state.
    ``apply_update`` models an OS-side change to an entry: it resets the
    page's bits and notifies registered hooks (the shootdown path).
    """

    def __init__(self, mode: str = "hashed", seed: int = 0):
        if mode not in ("identity", "hashed"):
            raise ValueError(f"unknown page table mode: {mode!r}")
        self.mode = mode
        self.seed = seed
        self._access: set[int] = set()
        self._dirty: set[int] = set()
        self._hooks: list[Callable[[int], None]] = []

    def ppn_of(self, vpn: int) -> int:
        if self.mode == "identity":
            return vpn & _PPN_MASK
        return splitmix64(vpn ^ self.seed) & _PPN_MASK

    def lookup(self, vpn: int) -> Pte:
        """Current PTE for a page (the simulator's ground truth)."""
        return Pte(
            ppn=self.ppn_of(vpn),
            readable=True,
            writable=True,
            access=vpn in self._access,
            dirty=vpn in self._dirty,
        )

    def set_access(self, vpn: int) -> None:
        self._access.add(vpn)

    def set_dirty(self, vpn: int) -> None:
        self._dirty.add(vpn)

    def add_update_hook(self, hook: Callable[[int], None]) -> None:
        self._hooks.append(hook)

    def apply_update(self, vpn: int) -> None:
        """OS-style change to the page's entry; fires the shootdown hooks."""
        self._access.discard(vpn)
        self._dirty.discard(vpn)
        for hook in self._hooks:
            hook(vpn)


class PscHierarchy:
    """Three split page-structure caches over the upper page-table levels."""

    def __init__(self, pml4_entries: int = 2, pdp_entries: int = 4,
                 pd_entries: int = 32, pd_ways: int = 4):
        # PML4 and PDP are fully associative per the default geometry.
        self.pml4 = SetAssocArray(1, pml4_entries)
        self.pdp = SetAssocArray(1, pdp_entries)
        self.pd = SetAssocArray(pd_entries // pd_ways, pd_ways)

    def invalidate_all(self) -> None:
        self.pml4.invalidate_all()
        self.pdp.invalidate_all()
        self.pd.invalidate_all()


class Mmu:
    """CDTLB + STLB + walker bundle operating against one page-table model.

    All reads/writes of the modeled structures are charged to the shared
    Counters.  ``stlb_fill_policy`` selects where the STLB gets filled from:
    ``on_cdtlb_evict`` (victims of CDTLB evictions are inserted if absent),
    ``on_walk`` (walked PTEs fill the STLB directly), or ``never``.
    """

    def __init__(self, page_table: PageTableModel, counters: Counters,
                 page_bits: int = 12,
                 cdtlb_entries: int = 64, cdtlb_ways: int = 4,
                 stlb_entries: int = 1536, stlb_ways: int = 12,
                 stlb_fill_policy: str = "on_cdtlb_evict",
                 psc: Optional[PscHierarchy] = None):
        if stlb_fill_policy not in ("on_cdtlb_evict", "on_walk", "never"):
            raise ValueError(f"unknown stlb fill policy: {stlb_fill_policy!r}")
        if not MIN_PAGE_BITS <= page_bits <= MAX_PAGE_BITS:
            raise ValueError("page_bits out of range")
        self.page_table = page_table
        self.counters = counters
        self.page_bits = page_bits
        self.stlb_fill_policy = stlb_fill_policy
        self.cdtlb = SetAssocArray(cdtlb_entries // cdtlb_ways, cdtlb_ways)
        self.stlb = SetAssocArray(stlb_entries // stlb_ways, stlb_ways)
        self.psc = psc if psc is not None else PscHierarchy()

    # -- TLB accesses -------------------------------------------------------

    def cdtlb_access(self, vpn: int) -> Optional[Pte]:
        self.counters.cdtlb_reads += 1
        return self.cdtlb.lookup(vpn, touch=True)

    def cdtlb_probe(self, vpn: int) -> Optional[Pte]:
        """Non-destructive presence check; charged to a diagnostic counter only."""
        self.counters.cdtlb_probes += 1
        return self.cdtlb.lookup(vpn, touch=False)

    def cdtlb_fill(self, vpn: int, pte: Pte):
        """Insert a private copy of ``pte``; applies the eviction backfill policy."""
        self.counters.cdtlb_writes += 1
        evicted = self.cdtlb.insert(vpn, pte.copy())
        if evicted is not None and self.stlb_fill_policy == "on_cdtlb_evict":
            self.counters.stlb_reads += 1
            if self.stlb.lookup(evicted.key, touch=False) is None:
                self.counters.stlb_writes += 1
                self.stlb.insert(evicted.key, evicted.payload)
        return evicted

    def stlb_access(self, vpn: int) -> Optional[Pte]:
        self.counters.stlb_reads += 1
        return self.stlb.lookup(vpn, touch=True)

    def stlb_fill(self, vpn: int, pte: Pte):
        self.counters.stlb_writes += 1
        return self.stlb.insert(vpn, pte.copy())

    def invalidate_vpn(self, vpn: int) -> None:
        self.cdtlb.invalidate_key(vpn)
        self.stlb.invalidate_key(vpn)

    # -- page walk ----------------------------------------------------------

    def walk(self, vaddr: int) -> tuple[Pte, int, int]:
        """Walk the page table for ``vaddr``.

        Probes every page-structure cache that exists for the configured page
        size, fills the ones that missed, and starts the walk below the
        deepest hit.  Returns (pte, mem_refs, psc_hits) where ``psc_hits`` is
        the number of upper levels the walk skipped, so that
        ``mem_refs + psc_hits`` always equals the number of walk levels
        (4 for page sizes below 2MB).  The walker sets the page's Access bit.
        """
        c = self.counters
        c.walks += 1
        page_bits = self.page_bits
        levels = []
        psc = self.psc
        if page_bits < 39:
            levels.append((39, psc.pml4, "pml4"))
        if page_bits < 30:
            levels.append((30, psc.pdp, "pdp"))
        if page_bits < 21:
            levels.append((21, psc.pd, "pd"))

        deepest = -1
        missed = []
        for idx, (low, arr, name) in enumerate(levels):
            key = vaddr >> low
            if name == "pml4":
                c.psc_pml4_reads += 1
            elif name == "pdp":
                c.psc_pdp_reads += 1
            else:
                c.psc_pd_reads += 1
            if arr.lookup(key, touch=True) is not None:
                deepest = idx
            else:
                missed.append((key, arr, name))

        for key, arr, name in missed:
            if name == "pml4":
                c.psc_pml4_writes += 1
            elif name == "pdp":
                c.psc_pdp_writes += 1
            else:
                c.psc_pd_writes += 1
            arr.insert(key, True)

        below = len(levels) - 1 - deepest
        mem_refs = below + 1
        psc_hits = deepest + 1
        c.walk_mem_reads += mem_refs
        c.psc_hits += psc_hits

        vpn = vaddr >> page_bits
        self.page_table.set_access(vpn)
        return self.page_table.lookup(vpn), mem_refs, psc_hits

    # -- store dirty-bit path ------------------------------------------------

    def store_dirty_path(self, vpn: int) -> str:
        """Ensure the Dirty bit is set for a retiring store to ``vpn``.

        The CDTLB must already hold the page (the store's normal miss handling
        runs first).  Returns which site resolved the bit: ``cdtlb_set`` (the
        cached entry was already dirty), ``stlb_copied`` (a dirty STLB copy
        was folded into the CDTLB entry), or ``walked`` (an extra store-miss
        walk set the bit in the page table and refreshed the CDTLB entry).
        """
        entry = self.cdtlb.lookup(vpn, touch=False)
        if entry is None:
            raise RuntimeError("store_dirty_path requires the page in the CDTLB")
        if entry.dirty:
            return "cdtlb_set"
        self.counters.stlb_reads += 1
        stlb_entry = self.stlb.lookup(vpn, touch=True)
        if stlb_entry is not None and stlb_entry.dirty:
            entry.dirty = True
            self.counters.cdtlb_writes += 1
            return "stlb_copied"
        self.page_table.set_dirty(vpn)
        pte, _, _ = self.walk(vpn << self.page_bits)
        entry.dirty = pte.dirty
        entry.access = pte.access
        self.counters.cdtlb_writes += 1
        return "walked"
