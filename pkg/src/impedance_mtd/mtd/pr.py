"""
Defense policy, PR-rate scheduling and randomized partial reconfiguration.

A partial bitstream always describes a protected region relative to its base
placement (the layout of the original full bitstream): the records list every
bit that sits elsewhere, and the optional permutation is the load order. An
absent permutation means the identity order, so each bitstream is complete on
its own and the previous one does not need to be known.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from ..errors import BitstreamError, CapacityError, ParameterError
from ..fabric import CellCoord, ConstraintLimits, FabricGeometry, FabricState, Placement, validate_placement
from .bitstream import PartialBitstream
from .shuffle import is_permutation, random_permutation, seq_decode, seq_encode


@dataclass(frozen=True)
class MtdPolicy:
    """Which strategies are active.

    ``slice_mux`` is the number of register instances (0 or 1 means off).
    ``limits`` holds one reconfiguration range per protected region, in
    region order; an empty tuple means each region's own limits.
    """

    slice_mux: int = 0
    seq_mux: bool = False
    randomized_pr: bool = False
    pr_rate: int = 1
    seed: int = 0
    limits: tuple = ()

    def __post_init__(self):
        if int(self.pr_rate) != self.pr_rate or self.pr_rate < 1:
            raise ParameterError("pr_rate must be an integer >= 1")
        if self.slice_mux < 0:
            raise ParameterError("slice_mux must be >= 0")
        object.__setattr__(self, "limits", tuple(self.limits))

    @property
    def n_instances(self) -> int:
        return max(1, int(self.slice_mux))

    @property
    def pr_enabled(self) -> bool:
        """Whether a partial bitstream is generated at trigger points."""
        return bool(self.seq_mux or self.randomized_pr)

    @property
    def enabled(self) -> bool:
        return self.pr_enabled or self.n_instances > 1

    def to_json(self) -> dict:
        return {
            "slice_mux": int(self.slice_mux),
            "seq_mux": bool(self.seq_mux),
            "randomized_pr": bool(self.randomized_pr),
            "pr_rate": int(self.pr_rate),
            "seed": int(self.seed),
            "limits": [lim.to_json() for lim in self.limits],
        }

    @classmethod
    def from_json(cls, obj: dict) -> MtdPolicy:
        return cls(
            slice_mux=int(obj.get("slice_mux", 0)),
            seq_mux=bool(obj.get("seq_mux", False)),
            randomized_pr=bool(obj.get("randomized_pr", False)),
            pr_rate=int(obj.get("pr_rate", 1)),
            seed=int(obj.get("seed", 0)),
            limits=tuple(ConstraintLimits.from_json(x) for x in obj.get("limits", ())),
        )


def should_trigger(encryption_counter: int, pr_rate: int) -> bool:
    """True when a new layout is loaded before encryption ``encryption_counter`` (0-based)."""
    if pr_rate < 1:
        raise ParameterError("pr_rate must be >= 1")
    return encryption_counter % pr_rate == 0


def _relocate(n: int, geometry: FabricGeometry, limits: ConstraintLimits,
              rng_stream: np.random.Generator) -> list[CellCoord]:
    sites = list(limits.sites(geometry))
    variants = sorted(limits.allowed_route_variants)
    if n > len(sites):
        raise CapacityError(f"{n} bits do not fit into {len(sites)} flip-flops")
    n_choices = len(sites) * len(variants)
    used: set = set()
    out = []
    for _ in range(n):
        while True:
            idx = int(rng_stream.integers(0, n_choices))
            site = sites[idx // len(variants)]
            if site not in used:
                break
        used.add(site)
        out.append(CellCoord(*site, variants[idx % len(variants)]))
    return out


def generate_pr(policy: MtdPolicy, base_placement: Placement, rng_stream: np.random.Generator, *,
                geometry: FabricGeometry, limits: ConstraintLimits | None = None,
                region_id: int = 0, n_instances: int | None = None) -> tuple[Placement, PartialBitstream]:
    """Draw a fresh one-time layout for one protected region.

    With ``randomized_pr`` every bit moves to a uniformly drawn free
    (flip-flop, route variant) pair inside ``limits``; a draw that lands on a
    flip-flop already taken is rejected and redrawn. With ``seq_mux`` a
    uniform load order over the register width is drawn afterwards.
    """
    base = Placement(base_placement)
    if limits is None:
        if not policy.limits:
            raise ParameterError("no constraint limits for the region")
        limits = policy.limits[min(region_id, len(policy.limits) - 1)]
    limits.check(geometry)
    n_inst = policy.n_instances if n_instances is None else n_instances
    if len(base) % n_inst:
        raise ParameterError("region size is not a multiple of the instance count")
    if len(base) > limits.site_capacity(geometry):
        raise CapacityError(f"{len(base)} bits do not fit into {limits.site_capacity(geometry)} flip-flops")

    coords = list(base.assignment)
    if policy.randomized_pr:
        coords = _relocate(len(base), geometry, limits, rng_stream)
    perm = random_permutation(rng_stream, len(base) // n_inst) if policy.seq_mux else None
    records = tuple((i, *c) for i, (c, b) in enumerate(zip(coords, base)) if c != b)
    return Placement(tuple(coords)), PartialBitstream(region_id, records, perm)


def apply_pr(state: FabricState, bs: PartialBitstream) -> FabricState:
    """Program ``bs`` into its region, keeping the logical register values intact."""
    try:
        k, reg = state.region(bs.region_id)
    except ParameterError as exc:
        raise BitstreamError("region_id", str(exc)) from None

    coords = list(reg.base)
    seen = set()
    for rec in bs.records:
        i, c = rec[0], CellCoord(*rec[1:6])
        if not 0 <= i < reg.size:
            raise BitstreamError("records", f"bit index {i} outside region of {reg.size} bits")
        if i in seen:
            raise BitstreamError("records", f"bit index {i} listed twice")
        seen.add(i)
        if not state.geometry.contains(c) or not reg.limits.admits(c):
            raise BitstreamError("records", f"bit {i}: {tuple(c)} outside the region limits")
        coords[i] = c
    if bs.perm is not None and not is_permutation(bs.perm, reg.n_bits):
        raise BitstreamError("perm", f"not a permutation of {reg.n_bits} bits")

    full = list(state.placement.assignment)
    full[reg.span] = coords
    problems = validate_placement(Placement(tuple(full)), state.geometry)
    if problems:
        raise BitstreamError("records", problems[0])

    # re-store every instance under the new load order
    bits = np.asarray(state.bits, dtype=np.uint8)
    block = bits[reg.span].reshape(reg.n_instances, reg.n_bits)
    old, new = state.perms[k], bs.perm
    if old != new:
        for row in range(reg.n_instances):
            logical = block[row] if old is None else seq_decode(block[row], old)
            block[row] = logical if new is None else seq_encode(logical, new)
        bits[reg.span] = block.reshape(-1)
    perms = list(state.perms)
    perms[k] = None if new is None else tuple(new)
    return replace(state, placement=Placement(tuple(full)), bits=tuple(bits.tolist()), perms=tuple(perms))
