"""Per-run accumulators shared by the translation structures and the engine."""

from __future__ import annotations

_FIELDS = (
    "instructions", "loads", "stores", "others", "pte_updates",
    "site_cdtlb", "site_stlb", "site_walk",
    "site_pcat_m", "site_pcat_hs", "site_pcat_hd",
    "cdtlb_reads", "cdtlb_writes", "cdtlb_probes",
    "stlb_reads", "stlb_writes",
    "pcat1_tag_reads", "pcat1_data_reads", "pcat1_writes",
    "pcat2_reads", "pcat2_writes",
    "walk_mem_reads",
    "psc_pml4_reads", "psc_pml4_writes",
    "psc_pdp_reads", "psc_pdp_writes",
    "psc_pd_reads", "psc_pd_writes",
    "walks", "psc_hits",
    "distinct_data_pages",
)


class Counters:
    """Flat integer event counts for one simulation run.

    ``cdtlb_probes`` counts the non-destructive probes used only to classify
    PCAT service sites; they model a hypothetical access and are kept apart
    from ``cdtlb_reads`` so the energy model can ignore them.
    """

    __slots__ = _FIELDS

    FIELDS = _FIELDS

    def __init__(self):
        for f in _FIELDS:
            setattr(self, f, 0)

    # Loads that had to consult the STLB, and loads that went on to walk.
    @property
    def loads_to_stlb(self) -> int:
        return self.site_stlb + self.site_walk

    @property
    def loads_to_walk(self) -> int:
        return self.site_walk

    def to_dict(self) -> dict:
        return {f: getattr(self, f) for f in _FIELDS}

    def __eq__(self, other) -> bool:
        if not isinstance(other, Counters):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    def __repr__(self) -> str:
        nonzero = {k: v for k, v in self.to_dict().items() if v}
        return f"Counters({nonzero})"
