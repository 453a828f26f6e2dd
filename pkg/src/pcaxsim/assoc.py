"""Generic set-associative array with true-LRU and a flag-aware LRU variant.

One container backs every lookup structure in the simulator: the PC-indexed
translation tables, both TLB levels, the page-structure caches, and the
instruction-block directories.  Keys are nonnegative integers; the set index
is ``key mod sets`` and the stored tag is ``key div sets``.  Recency comes
from a single monotone counter shared by the whole array, which keeps true
LRU order exact within every set and makes recency comparable across sets.

Each slot carries two replacement-hint bits, ``useful`` and ``stlbm``.  The
MODIFIED_LRU policy never victimizes a slot with either bit set unless every
valid slot in the set is flagged.  Clients that have no use for the bits
simply leave them 0, which degenerates to plain LRU.
"""

from __future__ import annotations

from enum import Enum
from typing import Any, NamedTuple


class Policy(Enum):
    LRU = "lru"
    MODIFIED_LRU = "modified_lru"


class Match(NamedTuple):
    way: int
    payload: Any
    useful: int
    stlbm: int
    gen: int
    recency: int


class Evicted(NamedTuple):
    key: int
    payload: Any
    useful: int
    stlbm: int


class SetAssocArray:
    def __init__(self, sets: int, ways: int):
        if sets < 1 or sets & (sets - 1):
            raise ValueError("sets must be a power of two")
        if ways < 1:
            raise ValueError("ways must be >= 1")
        self.sets = sets
        self.ways = ways
        n = sets * ways
        self._tags = [-1] * n          # -1 marks an invalid slot
        self._payloads: list[Any] = [None] * n
        self._recency = [0] * n
        self._useful = [0] * n
        self._stlbm = [0] * n
        self._gen = [0] * n            # bumped on every allocation
        self._clock = 0

    # -- addressing -------------------------------------------------------

    def set_index(self, key: int) -> int:
        return key % self.sets

    def tag_of(self, key: int) -> int:
        return key // self.sets

    def _key_at(self, set_index: int, slot: int) -> int:
        return self._tags[slot] * self.sets + set_index

    # -- lookups ----------------------------------------------------------

    def lookup(self, key: int, touch: bool = True):
        """Payload of the matching valid slot, or None.

        With ``touch`` the match becomes most recent; without it the probe is
        non-destructive and leaves all replacement state unchanged.
        """
        si = key % self.sets
        tag = key // self.sets
        base = si * self.ways
        tags = self._tags
        for w in range(base, base + self.ways):
            if tags[w] == tag:
                if touch:
                    self._clock += 1
                    self._recency[w] = self._clock
                return self._payloads[w]
        return None

    def lookup_all(self, key: int) -> list[Match]:
        """All valid matches in the set, most recent first; no recency update."""
        si = key % self.sets
        tag = key // self.sets
        base = si * self.ways
        out = [
            Match(w - base, self._payloads[w], self._useful[w], self._stlbm[w],
                  self._gen[w], self._recency[w])
            for w in range(base, base + self.ways)
            if self._tags[w] == tag
        ]
        out.sort(key=lambda m: -m.recency)
        return out

    def valid_count(self, set_index: int) -> int:
        base = set_index * self.ways
        return sum(1 for w in range(base, base + self.ways) if self._tags[w] >= 0)

    # -- replacement ------------------------------------------------------

    def victim_way(self, set_index: int, policy: Policy = Policy.LRU) -> int:
        """Victim way for a full set.

        MODIFIED_LRU returns the least-recent slot among those with neither
        the useful nor the stlbm bit set; if every slot is flagged it falls
        back to the least-recent slot overall.
        """
        base = set_index * self.ways
        rec = self._recency
        if policy is Policy.MODIFIED_LRU:
            best = -1
            for w in range(base, base + self.ways):
                if not self._useful[w] and not self._stlbm[w]:
                    if best < 0 or rec[w] < rec[best]:
                        best = w
            if best >= 0:
                return best - base
        best = base
        for w in range(base + 1, base + self.ways):
            if rec[w] < rec[best]:
                best = w
        return best - base

    def insert(self, key: int, payload: Any, useful: int = 0, stlbm: int = 0,
               policy: Policy = Policy.LRU):
        """Insert a new entry; returns the evicted (key, payload, flags) if any.

        A free slot in the set is used first; otherwise the policy picks the
        victim.  The inserted slot becomes most recent.  Duplicate keys are
        allowed (clients that need unique keys manage that themselves).
        """
        si = key % self.sets
        base = si * self.ways
        tags = self._tags
        slot = -1
        for w in range(base, base + self.ways):
            if tags[w] < 0:
                slot = w
                break
        evicted = None
        if slot < 0:
            slot = base + self.victim_way(si, policy)
            evicted = Evicted(self._key_at(si, slot), self._payloads[slot],
                              self._useful[slot], self._stlbm[slot])
        tags[slot] = key // self.sets
        self._payloads[slot] = payload
        self._useful[slot] = useful
        self._stlbm[slot] = stlbm
        self._gen[slot] += 1
        self._clock += 1
        self._recency[slot] = self._clock
        return evicted

    # -- slot-level access (used by the PCAT machinery) --------------------

    def touch(self, key: int, way: int) -> None:
        slot = (key % self.sets) * self.ways + way
        self._clock += 1
        self._recency[slot] = self._clock

    def slot_gen(self, key: int, way: int) -> int:
        return self._gen[(key % self.sets) * self.ways + way]

    def slot_flags(self, key: int, way: int) -> tuple[int, int]:
        slot = (key % self.sets) * self.ways + way
        return self._useful[slot], self._stlbm[slot]

    def set_slot_useful(self, set_index: int, way: int, gen: int) -> bool:
        """Set the useful bit if the slot is still the same allocation."""
        slot = set_index * self.ways + way
        if self._tags[slot] >= 0 and self._gen[slot] == gen:
            self._useful[slot] = 1
            return True
        return False

    # -- invalidation -----------------------------------------------------

    def invalidate_all(self) -> None:
        n = self.sets * self.ways
        self._tags = [-1] * n
        self._payloads = [None] * n

    def invalidate_key(self, key: int) -> bool:
        """Invalidate the first slot matching ``key``; True if one was found."""
        si = key % self.sets
        tag = key // self.sets
        base = si * self.ways
        for w in range(base, base + self.ways):
            if self._tags[w] == tag:
                self._tags[w] = -1
                self._payloads[w] = None
                return True
        return False

    def invalidate_slot(self, key: int, way: int) -> None:
        slot = (key % self.sets) * self.ways + way
        self._tags[slot] = -1
        self._payloads[slot] = None

    # -- introspection ----------------------------------------------------

    def items(self):
        """Yield (key, payload, useful, stlbm) for every valid slot."""
        for si in range(self.sets):
            base = si * self.ways
            for w in range(base, base + self.ways):
                if self._tags[w] >= 0:
                    yield (self._tags[w] * self.sets + si, self._payloads[w],
                           self._useful[w], self._stlbm[w])
