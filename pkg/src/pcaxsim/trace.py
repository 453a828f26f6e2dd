"""Canonical trace records, their binary/CSV serialization, and a synthetic workload generator.

A trace is a flat sequence of dynamic instruction events.  The binary form is
a headerless concatenation of fixed 17-byte records: one kind byte, then the
PC and the data virtual address as 8 little-endian bytes each.  The text form
is one ``kind,pc,vaddr`` line per record with the kind in decimal and the
addresses in lowercase hex.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from enum import IntEnum
from typing import IO, Iterable, Iterator

from .mix import splitmix64

RECORD_BYTES = 17
_RECORD_STRUCT = struct.Struct("<BQQ")

#: Instruction PCs are 4-byte aligned, so a 64-byte block holds 16 slots.
PC_ALIGN = 4
BLOCK_BYTES = 64
SLOTS_PER_BLOCK = BLOCK_BYTES // PC_ALIGN

#: Layout granularity of the generator's per-load data regions.
GEN_PAGE_BYTES = 4096

_CODE_BASE = 0x0040_0000
_DATA_BASE = 1 << 32


class RecordKind(IntEnum):
    LOAD = 0
    STORE = 1
    OTHER = 2
    PTE_UPDATE = 3


class TraceError(Exception):
    """Base class for malformed trace data."""


class UnknownKindError(TraceError):
    def __init__(self, kind_byte: int, offset: int = 0):
        super().__init__(f"unknown record kind byte 0x{kind_byte:02x} at byte offset {offset}")
        self.kind_byte = kind_byte
        self.offset = offset


class TruncatedRecordError(TraceError):
    def __init__(self, have: int, offset: int = 0):
        super().__init__(
            f"truncated record at byte offset {offset}: {have} bytes remain, {RECORD_BYTES} needed"
        )
        self.have = have
        self.offset = offset


@dataclass(slots=True)
class TraceRecord:
    """One dynamic instruction event.

    ``vaddr`` is 0 for OTHER records; for PTE_UPDATE it is any address on the
    affected page.  The PC must be nonzero for LOAD/STORE/OTHER.
    """

    kind: int
    pc: int
    vaddr: int


def encode_record(r: TraceRecord) -> bytes:
    """Pack a record into its 17-byte little-endian form."""
    return _RECORD_STRUCT.pack(r.kind, r.pc, r.vaddr)


def decode_record(b, offset: int = 0) -> TraceRecord:
    """Decode one record from the first 17 bytes of ``b``.

    ``offset`` is only used to annotate error messages.  Raises
    TruncatedRecordError if fewer than 17 bytes are available and
    UnknownKindError for a kind byte above 3.
    """
    if len(b) < RECORD_BYTES:
        raise TruncatedRecordError(len(b), offset)
    kind, pc, vaddr = _RECORD_STRUCT.unpack_from(b)
    if kind > 3:
        raise UnknownKindError(kind, offset)
    return TraceRecord(kind, pc, vaddr)


def write_binary(records: Iterable[TraceRecord], fp: IO[bytes]) -> int:
    """Write records to a binary stream; returns the record count."""
    n = 0
    pack = _RECORD_STRUCT.pack
    for r in records:
        fp.write(pack(r.kind, r.pc, r.vaddr))
        n += 1
    return n


def read_binary(fp: IO[bytes]) -> Iterator[TraceRecord]:
    """Stream records from a binary trace; raises on a malformed tail."""
    offset = 0
    unpack = _RECORD_STRUCT.unpack
    record = TraceRecord
    while True:
        chunk = fp.read(RECORD_BYTES)
        if not chunk:
            return
        if len(chunk) < RECORD_BYTES:
            raise TruncatedRecordError(len(chunk), offset)
        kind, pc, vaddr = unpack(chunk)
        if kind > 3:
            raise UnknownKindError(kind, offset)
        yield record(kind, pc, vaddr)
        offset += RECORD_BYTES


def write_csv(records: Iterable[TraceRecord], fp: IO[str]) -> int:
    n = 0
    for r in records:
        fp.write(f"{r.kind:d},{r.pc:x},{r.vaddr:x}\n")
        n += 1
    return n


def read_csv(fp: IO[str]) -> Iterator[TraceRecord]:
    for lineno, line in enumerate(fp):
        line = line.strip()
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 3:
            raise TraceError(f"line {lineno + 1}: expected 3 fields, got {len(parts)}")
        try:
            kind = int(parts[0], 10)
            pc = int(parts[1], 16)
            vaddr = int(parts[2], 16)
        except ValueError as e:
            raise TraceError(f"line {lineno + 1}: {e}") from None
        if not 0 <= kind <= 3:
            raise UnknownKindError(kind, lineno + 1)
        yield TraceRecord(kind, pc, vaddr)


@dataclass
class SyntheticWorkloadSpec:
    """Knobs for the deterministic synthetic workload.

    The generated program is an outer loop of ``loop_length`` dynamic
    instructions.  Within the loop body the static loads execute round-robin;
    each load is preceded by ``filler_ratio`` OTHER records.  The last filler
    of each gap sits in slot 0 of the upcoming load's instruction block (the
    rest of that basic block), while the remaining fillers step 4 bytes at a
    time through the whole code footprint, cycling over every block.  Each
    static load walks a private data region by ``element_stride_bytes`` per
    dynamic instance, wrapping at the region end; data offsets persist across
    loop iterations, the instruction cursors reset.
    """

    n_static_loads: int
    region_pages_per_load: int
    element_stride_bytes: int
    code_blocks: int
    filler_ratio: int
    loop_length: int
    total_instructions: int
    seed: int

    def validate(self) -> None:
        if self.n_static_loads < 1:
            raise ValueError("n_static_loads must be >= 1")
        if self.element_stride_bytes < 1:
            raise ValueError("element_stride_bytes must be >= 1")
        if self.total_instructions < 1:
            raise ValueError("total_instructions must be >= 1")
        if self.region_pages_per_load < 1:
            raise ValueError("region_pages_per_load must be >= 1")
        if self.code_blocks < 1:
            raise ValueError("code_blocks must be >= 1")
        if self.filler_ratio < 0:
            raise ValueError("filler_ratio must be >= 0")
        if self.loop_length < 1:
            raise ValueError("loop_length must be >= 1")
        # Loads occupy slots 1..15 of a block; slot 0 is the filler preamble.
        if self.n_static_loads > (SLOTS_PER_BLOCK - 1) * self.code_blocks:
            raise ValueError("too many static loads for the code footprint")


def load_pc(spec: SyntheticWorkloadSpec, i: int) -> int:
    """Fixed PC of static load ``i``: block ``i mod code_blocks``, slots 1..15."""
    block = i % spec.code_blocks
    slot = 1 + (i // spec.code_blocks) % (SLOTS_PER_BLOCK - 1)
    return _CODE_BASE + block * BLOCK_BYTES + slot * PC_ALIGN


def gen_synthetic(spec: SyntheticWorkloadSpec) -> Iterator[TraceRecord]:
    """Generate exactly ``total_instructions`` records; pure function of the spec."""
    spec.validate()
    n = spec.n_static_loads
    region_bytes = spec.region_pages_per_load * GEN_PAGE_BYTES
    stride = spec.element_stride_bytes
    blocks = spec.code_blocks
    gap = spec.filler_ratio
    total = spec.total_instructions
    loop_length = spec.loop_length
    filler_slots = blocks * SLOTS_PER_BLOCK

    pcs = [load_pc(spec, i) for i in range(n)]
    bases = [_DATA_BASE + i * region_bytes for i in range(n)]
    # Seeded per-load start offsets, stride-aligned, desynchronize page crossings.
    offsets = [
        (splitmix64(spec.seed ^ (i * 0x9E3779B9 + 1)) % max(region_bytes // stride, 1)) * stride
        for i in range(n)
    ]

    load = RecordKind.LOAD
    other = RecordKind.OTHER
    rec = TraceRecord

    emitted = 0
    while emitted < total:
        in_loop = 0
        li = 0
        fc = 0
        while in_loop < loop_length and emitted < total:
            for k in range(gap):
                if in_loop >= loop_length or emitted >= total:
                    break
                if k == gap - 1:
                    pc = _CODE_BASE + (li % blocks) * BLOCK_BYTES
                else:
                    pc = _CODE_BASE + (fc // SLOTS_PER_BLOCK) * BLOCK_BYTES + (fc % SLOTS_PER_BLOCK) * PC_ALIGN
                    fc = (fc + 1) % filler_slots
                yield rec(other, pc, 0)
                emitted += 1
                in_loop += 1
            if in_loop >= loop_length or emitted >= total:
                break
            off = offsets[li]
            yield rec(load, pcs[li], bases[li] + off)
            offsets[li] = (off + stride) % region_bytes
            emitted += 1
            in_loop += 1
            li = (li + 1) % n
