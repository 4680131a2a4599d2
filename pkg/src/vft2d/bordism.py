"""Labeled surface bordisms between ordered collections of circles.

A bordism ``n_in -> n_out`` is a list of connected components.  Each
component has a genus, the incoming and outgoing circle slots it touches
(0-based), and a label: a complex volume with positive real part, a purely
imaginary volume, or zero.  Up to diffeomorphism this is all the data a 2d
bordism carries, so composition reduces to union-find over glued circles plus
Euler characteristic bookkeeping.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import CompositionError, StructureError
from .jsonio import decode_complex, encode_complex
from .report import ValidationReport


class LabelKind(enum.Enum):
    VOLUME = "volume"
    IMAGINARY = "imaginary"
    ZERO = "zero"


@dataclass(frozen=True)
class Label:
    kind: LabelKind
    value: complex = 0j

    def __post_init__(self):
        v = complex(self.value)
        object.__setattr__(self, "value", v)
        if self.kind is LabelKind.VOLUME and not v.real > 0:
            raise StructureError(f"volume label needs Re > 0, got {v}")
        if self.kind is LabelKind.IMAGINARY and v.real != 0:
            raise StructureError(f"imaginary label needs Re = 0, got {v}")
        if self.kind is LabelKind.ZERO and v != 0:
            raise StructureError(f"zero label carries value {v}")

    @classmethod
    def volume(cls, s: complex) -> "Label":
        return cls(LabelKind.VOLUME, s)

    @classmethod
    def imaginary(cls, zeta: float) -> "Label":
        """The label ``i * zeta``."""
        return cls(LabelKind.IMAGINARY, complex(0.0, zeta))

    @classmethod
    def zero(cls) -> "Label":
        return cls(LabelKind.ZERO)

    @classmethod
    def of(cls, z: complex) -> "Label":
        """Infer the kind from the value: Re > 0, Re = 0 (nonzero), or exactly 0."""
        z = complex(z)
        if z.real > 0:
            return cls.volume(z)
        if z == 0:
            return cls.zero()
        if z.real == 0:
            return cls(LabelKind.IMAGINARY, z)
        raise StructureError(f"label {z} has negative real part")

    def __add__(self, other: "Label") -> "Label":
        if not isinstance(other, Label):
            return NotImplemented
        kinds = {self.kind, other.kind}
        if LabelKind.VOLUME in kinds:
            kind = LabelKind.VOLUME
        elif LabelKind.IMAGINARY in kinds:
            kind = LabelKind.IMAGINARY
        else:
            kind = LabelKind.ZERO
        return Label(kind, self.value + other.value)

    def conjugate(self) -> "Label":
        return Label(self.kind, self.value.conjugate())

    def to_json(self) -> dict:
        return {"kind": self.kind.value, "value": encode_complex(self.value)}

    @classmethod
    def from_json(cls, data: dict) -> "Label":
        try:
            kind = LabelKind(data["kind"])
        except (KeyError, ValueError):
            raise StructureError(f"bad label {data!r}") from None
        return cls(kind, decode_complex(data.get("value", [0.0, 0.0])))


ZERO = Label.zero()


@dataclass(frozen=True)
class Component:
    genus: int
    ins: tuple[int, ...] = ()
    outs: tuple[int, ...] = ()
    label: Label = ZERO

    def __post_init__(self):
        object.__setattr__(self, "ins", tuple(sorted(int(i) for i in self.ins)))
        object.__setattr__(self, "outs", tuple(sorted(int(i) for i in self.outs)))

    @property
    def euler(self) -> int:
        return 2 - 2 * self.genus - len(self.ins) - len(self.outs)

    @property
    def closed(self) -> bool:
        return not self.ins and not self.outs

    @property
    def is_cylinder(self) -> bool:
        return self.genus == 0 and len(self.ins) == 1 and len(self.outs) == 1

    def sort_key(self):
        if self.ins:
            return (0, self.ins[0], 0, 0.0, 0.0, "")
        if self.outs:
            return (1, self.outs[0], 0, 0.0, 0.0, "")
        v = self.label.value
        return (2, 0, self.genus, v.real, v.imag, self.label.kind.value)

    def to_json(self) -> dict:
        return {"genus": self.genus, "in": list(self.ins), "out": list(self.outs), "label": self.label.to_json()}

    @classmethod
    def from_json(cls, data: dict) -> "Component":
        try:
            return cls(
                int(data["genus"]),
                tuple(data.get("in", ())),
                tuple(data.get("out", ())),
                Label.from_json(data["label"]) if "label" in data else ZERO,
            )
        except KeyError as exc:
            raise StructureError(f"component JSON missing field {exc}") from None


@dataclass(frozen=True, eq=False)
class Bordism:
    n_in: int
    n_out: int
    components: tuple[Component, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))

    # comparisons are up to reordering of components
    def canonical(self) -> "Bordism":
        return Bordism(self.n_in, self.n_out, tuple(sorted(self.components, key=Component.sort_key)))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Bordism):
            return NotImplemented
        return (self.n_in, self.n_out, self.canonical().components) == (
            other.n_in,
            other.n_out,
            other.canonical().components,
        )

    def __hash__(self) -> int:
        return hash((self.n_in, self.n_out, self.canonical().components))

    @property
    def euler(self) -> int:
        return sum(c.euler for c in self.components)

    @property
    def total_label(self) -> complex:
        return sum((c.label.value for c in self.components), 0j)

    def with_labels(self, labels: Sequence[Label]) -> "Bordism":
        if len(labels) != len(self.components):
            raise StructureError("one label per component required")
        return Bordism(
            self.n_in,
            self.n_out,
            tuple(Component(c.genus, c.ins, c.outs, lab) for c, lab in zip(self.components, labels)),
        )

    def relabel(self, label: Label) -> "Bordism":
        return self.with_labels([label] * len(self.components))

    # elementary shapes ----------------------------------------------------

    @classmethod
    def empty(cls) -> "Bordism":
        return cls(0, 0, ())

    @classmethod
    def cylinder(cls, label: Label = ZERO) -> "Bordism":
        return cls(1, 1, (Component(0, (0,), (0,), label),))

    @classmethod
    def identity(cls, n: int) -> "Bordism":
        return cls(n, n, tuple(Component(0, (i,), (i,)) for i in range(n)))

    @classmethod
    def permutation(cls, perm: Sequence[int]) -> "Bordism":
        """Outgoing circle ``k`` is incoming circle ``perm[k]``."""
        n = len(perm)
        if sorted(perm) != list(range(n)):
            raise StructureError(f"{perm!r} is not a permutation")
        return cls(n, n, tuple(Component(0, (p,), (k,)) for k, p in enumerate(perm)))

    @classmethod
    def pants(cls, label: Label = ZERO) -> "Bordism":
        return cls(2, 1, (Component(0, (0, 1), (0,), label),))

    @classmethod
    def copants(cls, label: Label = ZERO) -> "Bordism":
        return cls(1, 2, (Component(0, (0,), (0, 1), label),))

    @classmethod
    def disk(cls, label: Label = ZERO) -> "Bordism":
        """The disk read as a bordism from one circle to nothing."""
        return cls(1, 0, (Component(0, (0,), (), label),))

    @classmethod
    def codisk(cls, label: Label = ZERO) -> "Bordism":
        return cls(0, 1, (Component(0, (), (0,), label),))

    @classmethod
    def closed(cls, genus: int, label: Label = ZERO) -> "Bordism":
        return cls(0, 0, (Component(genus, (), (), label),))

    @classmethod
    def connected(cls, genus: int, n_in: int, n_out: int, label: Label = ZERO) -> "Bordism":
        return cls(n_in, n_out, (Component(genus, tuple(range(n_in)), tuple(range(n_out)), label),))

    # serialization --------------------------------------------------------

    def to_json(self) -> dict:
        return {"n_in": self.n_in, "n_out": self.n_out, "components": [c.to_json() for c in self.components]}

    @classmethod
    def from_json(cls, data: dict) -> "Bordism":
        try:
            return cls(int(data["n_in"]), int(data["n_out"]), tuple(Component.from_json(c) for c in data["components"]))
        except KeyError as exc:
            raise StructureError(f"bordism JSON missing field {exc}") from None


def validate(X: Bordism) -> ValidationReport:
    report = ValidationReport(f"bordism {X.n_in} -> {X.n_out}")
    for side, n, slots_of in (("in", X.n_in, lambda c: c.ins), ("out", X.n_out, lambda c: c.outs)):
        seen: dict[int, int] = {}
        bad = []
        for idx, c in enumerate(X.components):
            for s in slots_of(c):
                if s < 0 or s >= n:
                    bad.append(f"slot {s} out of range")
                elif s in seen:
                    bad.append(f"slot {s} shared by components {seen[s]} and {idx}")
                else:
                    seen[s] = idx
        missing = sorted(set(range(n)) - set(seen))
        bad.extend(f"slot {s} not attached" for s in missing)
        report.add(f"{side}_partition", len(bad), not bad, "; ".join(bad))
    bad_genus = [c.genus for c in X.components if not (isinstance(c.genus, int) and c.genus >= 0)]
    report.add("genus", len(bad_genus), not bad_genus, ", ".join(f"genus {g}" for g in bad_genus))
    bad_labels = [c.label for c in X.components if not isinstance(c.label, Label)]
    report.add("labels", len(bad_labels), not bad_labels)
    return report


def _require_valid(X: Bordism) -> None:
    report = validate(X)
    if not report.passed:
        raise CompositionError("; ".join(f"{c.name}: {c.detail}" for c in report.failures()))


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, a: int) -> int:
        while self.parent[a] != a:
            self.parent[a] = self.parent[self.parent[a]]
            a = self.parent[a]
        return a

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def compose(X: Bordism, Y: Bordism) -> Bordism:
    """Glue the outgoing circles of ``X`` to the incoming circles of ``Y`` (X first)."""
    if X.n_out != Y.n_in:
        raise CompositionError(f"cannot glue {X.n_out} outgoing circles to {Y.n_in} incoming")
    _require_valid(X)
    _require_valid(Y)
    a = len(X.components)
    pieces = list(X.components) + list(Y.components)
    uf = _UnionFind(len(pieces))
    x_out = {s: i for i, c in enumerate(X.components) for s in c.outs}
    y_in = {s: a + i for i, c in enumerate(Y.components) for s in c.ins}
    for s in range(X.n_out):
        uf.union(x_out[s], y_in[s])
    groups: dict[int, list[int]] = {}
    for i in range(len(pieces)):
        groups.setdefault(uf.find(i), []).append(i)
    merged = []
    for members in groups.values():
        ins = [s for i in members if i < a for s in pieces[i].ins]
        outs = [s for i in members if i >= a for s in pieces[i].outs]
        label = pieces[members[0]].label
        for i in members[1:]:
            label = label + pieces[i].label
        chi = sum(pieces[i].euler for i in members)
        twice_genus = 2 - chi - len(ins) - len(outs)
        assert twice_genus >= 0 and twice_genus % 2 == 0, "Euler characteristic bookkeeping broke"
        merged.append(Component(twice_genus // 2, tuple(ins), tuple(outs), label))
    return Bordism(X.n_in, Y.n_out, tuple(merged))


def compose_all(bordisms: Iterable[Bordism]) -> Bordism:
    it = iter(bordisms)
    result = next(it)
    for Y in it:
        result = compose(result, Y)
    return result


def monoidal(X: Bordism, Y: Bordism) -> Bordism:
    """Disjoint union; the circles of ``Y`` come after those of ``X``."""
    shifted = tuple(
        Component(c.genus, tuple(s + X.n_in for s in c.ins), tuple(s + X.n_out for s in c.outs), c.label)
        for c in Y.components
    )
    return Bordism(X.n_in + Y.n_in, X.n_out + Y.n_out, X.components + shifted)


def dual(X: Bordism) -> Bordism:
    """Swap incoming and outgoing boundary; labels are left alone."""
    return Bordism(X.n_out, X.n_in, tuple(Component(c.genus, c.outs, c.ins, c.label) for c in X.components))


# Morse decompositions ------------------------------------------------------


class Piece(enum.Enum):
    PANTS = "pants"
    COPANTS = "copants"
    DISK = "disk"
    CODISK = "codisk"
    CYLINDER = "cylinder"
    PERMUTATION = "permutation"


_WIDTH_CHANGE = {
    Piece.PANTS: -1,
    Piece.COPANTS: 1,
    Piece.DISK: -1,
    Piece.CODISK: 1,
    Piece.CYLINDER: 0,
    Piece.PERMUTATION: 0,
}


@dataclass(frozen=True)
class Step:
    """One elementary piece acting on a row of ``width`` strands.

    The piece sits at ``position`` (PANTS consumes ``position`` and
    ``position + 1``); every other strand passes through a zero-labeled
    cylinder.  For PERMUTATION, output strand ``k`` is input strand ``perm[k]``.
    """

    kind: Piece
    width: int
    position: int = 0
    label: Label = ZERO
    perm: tuple[int, ...] = ()

    @property
    def width_out(self) -> int:
        return self.width + _WIDTH_CHANGE[self.kind]

    def bordism(self) -> Bordism:
        w, p, k = self.width, self.position, self.kind
        if k is Piece.PERMUTATION:
            return Bordism.permutation(self.perm)
        need = 2 if k is Piece.PANTS else (0 if k is Piece.CODISK else 1)
        if not (0 <= p and p + need <= w):
            raise CompositionError(f"{k.value} at {p} does not fit {w} strands")
        if k is Piece.PANTS:
            main = Component(0, (p, p + 1), (p,), self.label)
            shift_in = lambda i: i - 1 if i > p + 1 else i  # noqa: E731
            skip = {p, p + 1}
        elif k is Piece.COPANTS:
            main = Component(0, (p,), (p, p + 1), self.label)
            shift_in = lambda i: i + 1 if i > p else i  # noqa: E731
            skip = {p}
        elif k is Piece.DISK:
            main = Component(0, (p,), (), self.label)
            shift_in = lambda i: i - 1 if i > p else i  # noqa: E731
            skip = {p}
        elif k is Piece.CODISK:
            main = Component(0, (), (p,), self.label)
            shift_in = lambda i: i + 1 if i >= p else i  # noqa: E731
            skip = set()
        else:
            main = Component(0, (p,), (p,), self.label)
            shift_in = lambda i: i  # noqa: E731
            skip = {p}
        comps = [Component(0, (i,), (shift_in(i),)) for i in range(w) if i not in skip]
        return Bordism(w, self.width_out, tuple([main] + comps))


def recompose(steps: Sequence[Step], n_in: int) -> Bordism:
    result = Bordism.identity(n_in)
    width = n_in
    for st in steps:
        if st.width != width:
            raise CompositionError(f"step {st.kind.value} expects {st.width} strands, have {width}")
        result = compose(result, st.bordism())
        width = st.width_out
    return result


def decompose(X: Bordism) -> list[Step]:
    """Canonical Morse decomposition.

    Components are handled one after another in canonical order: route the
    inputs next to each other, put the whole label on one cylinder, merge the
    inputs with pants, add each handle as copants followed by pants, split
    into the outputs with copants, and finally route the outputs to their slots.
    """
    _require_valid(X)
    order = X.canonical().components
    steps: list[Step] = []
    init = tuple(s for c in order for s in c.ins)
    if init != tuple(range(X.n_in)):
        steps.append(Step(Piece.PERMUTATION, X.n_in, perm=init))
    width, pos = X.n_in, 0
    placed_outs: list[int] = []

    def emit(kind, label=ZERO):
        nonlocal width
        steps.append(Step(kind, width, pos, label))
        width += _WIDTH_CHANGE[kind]

    for c in order:
        if not c.ins:
            emit(Piece.CODISK)
        if c.label.kind is not LabelKind.ZERO:
            emit(Piece.CYLINDER, c.label)
        for _ in range(len(c.ins) - 1):
            emit(Piece.PANTS)
        for _ in range(c.genus):
            emit(Piece.COPANTS)
            emit(Piece.PANTS)
        if not c.outs:
            emit(Piece.DISK)
            continue
        for _ in range(len(c.outs) - 1):
            emit(Piece.COPANTS)
        placed_outs.extend(c.outs)
        pos += len(c.outs)
    final = tuple(placed_outs.index(j) for j in range(X.n_out))
    if final != tuple(range(X.n_out)):
        steps.append(Step(Piece.PERMUTATION, width, perm=final))
    return steps
