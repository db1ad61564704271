"""
Fabric geometry, register placement and reconfiguration constraint limits.

The fabric is a grid of CLBs, each holding ``slices_per_clb`` slices of
``ffs_per_slice`` flip-flops. A flip-flop reached through one of several
switch-box paths is a distinct :class:`CellCoord` (``route_variant``), since
the routing changes the impedance it presents to the power network.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator, NamedTuple, Sequence

from .errors import CapacityError, InvalidGeometryError, ParameterError

DEFAULT_ROUTE_VARIANTS = 4


@dataclass(frozen=True)
class FabricGeometry:
    width: int
    height: int
    slices_per_clb: int = 4
    ffs_per_slice: int = 8
    route_variants: int = DEFAULT_ROUTE_VARIANTS

    def __post_init__(self):
        for name in ("width", "height", "slices_per_clb", "ffs_per_slice", "route_variants"):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 1:
                raise InvalidGeometryError(f"{name} must be an integer >= 1, got {value!r}")

    @property
    def capacity(self) -> int:
        """Total number of flip-flops on the fabric."""
        return self.width * self.height * self.slices_per_clb * self.ffs_per_slice

    def contains(self, coord: CellCoord) -> bool:
        return (
            0 <= coord.clb_x < self.width
            and 0 <= coord.clb_y < self.height
            and 0 <= coord.slice < self.slices_per_clb
            and 0 <= coord.ff < self.ffs_per_slice
            and 0 <= coord.route_variant < self.route_variants
        )

    def to_json(self) -> dict:
        return {
            "width": self.width,
            "height": self.height,
            "slices_per_clb": self.slices_per_clb,
            "ffs_per_slice": self.ffs_per_slice,
            "route_variants": self.route_variants,
        }

    @classmethod
    def from_json(cls, obj: dict) -> FabricGeometry:
        return cls(**obj)


def new_fabric(width: int, height: int, slices_per_clb: int = 4, ffs_per_slice: int = 8,
               route_variants: int = DEFAULT_ROUTE_VARIANTS) -> FabricGeometry:
    return FabricGeometry(width, height, slices_per_clb, ffs_per_slice, route_variants)


class CellCoord(NamedTuple):
    clb_x: int
    clb_y: int
    slice: int
    ff: int
    route_variant: int = 0

    @property
    def site(self) -> tuple[int, int, int, int]:
        """The physical flip-flop, ignoring which route reaches it."""
        return (self.clb_x, self.clb_y, self.slice, self.ff)

    @property
    def slice_site(self) -> tuple[int, int, int]:
        return (self.clb_x, self.clb_y, self.slice)


@dataclass(frozen=True)
class ConstraintLimits:
    """Inclusive CLB rectangle plus the slices and route variants allowed in it."""

    x_min: int
    x_max: int
    y_min: int
    y_max: int
    allowed_slices: frozenset = frozenset({0, 1, 2, 3})
    allowed_route_variants: frozenset = frozenset({0})

    def __post_init__(self):
        object.__setattr__(self, "allowed_slices", frozenset(self.allowed_slices))
        object.__setattr__(self, "allowed_route_variants", frozenset(self.allowed_route_variants))
        if self.x_min > self.x_max or self.y_min > self.y_max:
            raise ParameterError("empty CLB region")
        if not self.allowed_slices or not self.allowed_route_variants:
            raise ParameterError("allowed slice and route-variant sets must be non-empty")

    @classmethod
    def whole(cls, geometry: FabricGeometry) -> ConstraintLimits:
        return cls(0, geometry.width - 1, 0, geometry.height - 1,
                   frozenset(range(geometry.slices_per_clb)),
                   frozenset(range(geometry.route_variants)))

    def check(self, geometry: FabricGeometry) -> None:
        if self.x_min < 0 or self.y_min < 0 or self.x_max >= geometry.width or self.y_max >= geometry.height:
            raise ParameterError("constraint region lies outside the fabric")
        if min(self.allowed_slices) < 0 or max(self.allowed_slices) >= geometry.slices_per_clb:
            raise ParameterError("allowed slice index outside the CLB")
        if (min(self.allowed_route_variants) < 0
                or max(self.allowed_route_variants) >= geometry.route_variants):
            raise ParameterError("allowed route variant outside the configured count")

    def site_capacity(self, geometry: FabricGeometry) -> int:
        nx = self.x_max - self.x_min + 1
        ny = self.y_max - self.y_min + 1
        return nx * ny * len(self.allowed_slices) * geometry.ffs_per_slice

    def sites(self, geometry: FabricGeometry) -> Iterator[tuple[int, int, int, int]]:
        """Physical sites in fill order: rows, then columns, then slices, then FFs."""
        slices = sorted(self.allowed_slices)
        for y in range(self.y_min, self.y_max + 1):
            for x in range(self.x_min, self.x_max + 1):
                for s in slices:
                    for ff in range(geometry.ffs_per_slice):
                        yield (x, y, s, ff)

    def admits(self, coord: CellCoord) -> bool:
        return (self.x_min <= coord.clb_x <= self.x_max
                and self.y_min <= coord.clb_y <= self.y_max
                and coord.slice in self.allowed_slices
                and coord.route_variant in self.allowed_route_variants)

    def to_json(self) -> dict:
        return {
            "x_min": self.x_min, "x_max": self.x_max,
            "y_min": self.y_min, "y_max": self.y_max,
            "slices": sorted(self.allowed_slices),
            "route_variants": sorted(self.allowed_route_variants),
        }

    @classmethod
    def from_json(cls, obj: dict) -> ConstraintLimits:
        return cls(obj["x_min"], obj["x_max"], obj["y_min"], obj["y_max"],
                   frozenset(obj.get("slices", (0, 1, 2, 3))),
                   frozenset(obj.get("route_variants", (0,))))


@dataclass(frozen=True)
class Placement:
    """Logical bit ``i`` lives at ``assignment[i]``."""

    assignment: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "assignment", tuple(CellCoord(*c) for c in self.assignment))

    def __len__(self) -> int:
        return len(self.assignment)

    def __iter__(self) -> Iterator[CellCoord]:
        return iter(self.assignment)

    def __getitem__(self, i):
        return self.assignment[i]

    def to_json(self, geometry: FabricGeometry | None = None,
                limits: ConstraintLimits | None = None) -> dict:
        out: dict = {"assignment": [[i, *c] for i, c in enumerate(self.assignment)]}
        if geometry is not None:
            out["geometry"] = geometry.to_json()
        if limits is not None:
            out["limits"] = limits.to_json()
        return out

    @classmethod
    def from_json(cls, obj: dict) -> Placement:
        rows = sorted(obj["assignment"], key=lambda r: r[0])
        if [r[0] for r in rows] != list(range(len(rows))):
            raise ParameterError("assignment bit indices must be 0..n-1")
        return cls(tuple(CellCoord(*r[1:6]) for r in rows))


def default_placement(geometry: FabricGeometry, n_bits: int, limits: ConstraintLimits) -> Placement:
    limits.check(geometry)
    cap = limits.site_capacity(geometry)
    if n_bits < 0:
        raise ParameterError("n_bits must be >= 0")
    if n_bits > cap:
        raise CapacityError(f"{n_bits} bits do not fit into {cap} flip-flops")
    variant = min(limits.allowed_route_variants)
    coords = []
    for site, _ in zip(limits.sites(geometry), range(n_bits)):
        coords.append(CellCoord(*site, variant))
    return Placement(tuple(coords))


def validate_placement(placement: Placement, geometry: FabricGeometry,
                       limits: ConstraintLimits | None = None) -> list[str]:
    """Return the list of violations; an empty list means the placement is valid.

    Two bits on the same physical flip-flop collide even when they name
    different route variants.
    """
    problems = []
    seen: dict[tuple, int] = {}
    for i, c in enumerate(placement):
        if not geometry.contains(c):
            problems.append(f"bit {i}: {tuple(c)} outside fabric geometry")
            continue
        if limits is not None:
            if not (limits.x_min <= c.clb_x <= limits.x_max and limits.y_min <= c.clb_y <= limits.y_max):
                problems.append(f"bit {i}: CLB ({c.clb_x},{c.clb_y}) out of region")
            if c.slice not in limits.allowed_slices:
                problems.append(f"bit {i}: slice {c.slice} not allowed")
            if c.route_variant not in limits.allowed_route_variants:
                problems.append(f"bit {i}: route variant {c.route_variant} not allowed")
        other = seen.setdefault(c.site, i)
        if other != i:
            problems.append(f"bit {i}: collides with bit {other} at {c.site}")
    return problems


@dataclass(frozen=True)
class Region:
    """A protected, reconfigurable register region.

    Occupies placement indices ``start .. start + size`` of the fabric state.
    ``base`` is the placement loaded by the original full bitstream; partial
    bitstreams are diffs against it. With slice multiplexing the region holds
    ``n_instances`` copies of an ``n_bits`` register back to back.
    """

    region_id: int
    start: int
    n_bits: int
    limits: ConstraintLimits
    base: tuple = ()
    n_instances: int = 1

    @property
    def size(self) -> int:
        return self.n_bits * self.n_instances

    @property
    def span(self) -> slice:
        return slice(self.start, self.start + self.size)


@dataclass(frozen=True)
class FabricState:
    geometry: FabricGeometry
    placement: Placement = field(default_factory=Placement)
    bits: tuple = ()
    regions: tuple = ()
    perms: tuple = ()  # active load permutation per region, or None

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        if not bits:
            bits = (0,) * len(self.placement)
        if len(bits) != len(self.placement):
            raise ParameterError("bits length must equal placement size")
        if any(b not in (0, 1) for b in bits):
            raise ParameterError("bits must be 0 or 1")
        object.__setattr__(self, "bits", bits)
        if not self.perms:
            object.__setattr__(self, "perms", (None,) * len(self.regions))

    def region(self, region_id: int) -> tuple[int, Region]:
        for k, reg in enumerate(self.regions):
            if reg.region_id == region_id:
                return k, reg
        raise ParameterError(f"no region with id {region_id}")

    def with_bits(self, bits: Sequence[int]) -> FabricState:
        return replace(self, bits=tuple(bits))


def build_state(geometry: FabricGeometry, regions: Iterable[tuple[int, ConstraintLimits, int]],
                n_instances: int = 1,
                placement_limits: Sequence[ConstraintLimits] | None = None) -> FabricState:
    """Lay out one region per ``(region_id, limits, n_bits)`` with the default fill.

    ``placement_limits`` optionally narrows where the base placement goes
    while ``limits`` remains the reconfiguration range.
    """
    coords: list = []
    regs = []
    for k, (rid, limits, n_bits) in enumerate(regions):
        limits.check(geometry)
        where = placement_limits[k] if placement_limits is not None else limits
        base = default_placement(geometry, n_bits * n_instances, where).assignment
        bad = validate_placement(Placement(base), geometry, limits)
        if bad:
            raise ParameterError(f"region {rid}: base placement violates limits: {bad[0]}")
        regs.append(Region(rid, len(coords), n_bits, limits, base, n_instances))
        coords.extend(base)
    placement = Placement(tuple(coords))
    bad = validate_placement(placement, geometry)
    if bad:
        raise ParameterError(f"regions overlap: {bad[0]}")
    return FabricState(geometry, placement, (), tuple(regs))
