"""Finite σ-complete Boolean algebras.

A finite Boolean algebra is the powerset of its atoms, so elements are
stored as bitmasks over the atom list: bit ``i`` is set when atom ``i``
lies below the element. Meets, joins and complements are bitwise
operations, every family has a meet and a join, and all the Boolean laws
are decidable by enumeration.
"""

import itertools
import logging
from collections.abc import Iterable, Iterator, Sequence
from typing import Self

from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from belieflang.errors import CapacityError, DomainError

logger = logging.getLogger(__name__)

# 2**2**5 candidate up-sets; six atoms would need 2**64.
DEFAULT_MAX_ATOMS = 5

Element = int


class FiniteBooleanAlgebra(BaseModel):
    """The Boolean algebra of all subsets of ``atoms``."""

    model_config = ConfigDict(frozen=True)

    atoms: tuple[str, ...]

    @field_validator("atoms")
    @classmethod
    def _non_degenerate(cls, atoms: tuple[str, ...]) -> tuple[str, ...]:
        if not atoms:
            raise ValueError("a Boolean algebra needs at least one atom")
        if len(set(atoms)) != len(atoms):
            raise ValueError(f"duplicate atoms in {list(atoms)}")
        return atoms

    @property
    def n(self) -> int:
        return len(self.atoms)

    @property
    def size(self) -> int:
        return 1 << len(self.atoms)

    @property
    def bottom(self) -> Element:
        return 0

    @property
    def top(self) -> Element:
        return (1 << len(self.atoms)) - 1

    def elements(self) -> range:
        return range(self.size)

    def contains(self, x: object) -> bool:
        return isinstance(x, int) and 0 <= x < self.size

    def check(self, *xs: Element) -> None:
        """Raise `DomainError` unless every argument is an element."""
        for x in xs:
            if not self.contains(x):
                raise DomainError(
                    f"{x!r} is not an element of the algebra over "
                    f"{list(self.atoms)}"
                )

    def meet(self, x: Element, y: Element) -> Element:
        """Greatest lower bound of two elements.

        Args:
            x: First element
            y: Second element

        Returns:
            Element: ``x ∧ y``, the atoms below both

        Raises:
            DomainError: If either argument is not an element
        """
        self.check(x, y)
        return x & y

    def join(self, x: Element, y: Element) -> Element:
        """Least upper bound of two elements.

        Args:
            x: First element
            y: Second element

        Returns:
            Element: ``x ∨ y``, the atoms below either

        Raises:
            DomainError: If either argument is not an element
        """
        self.check(x, y)
        return x | y

    def complement(self, x: Element) -> Element:
        """The unique ``¬x`` with ``x ∧ ¬x = 0`` and ``x ∨ ¬x = 1``.

        Raises:
            DomainError: If ``x`` is not an element
        """
        self.check(x)
        return self.top ^ x

    def leq(self, x: Element, y: Element) -> bool:
        """``x ≤ y``, i.e. ``x ∧ y = x``."""
        self.check(x, y)
        return x & y == x

    def meet_all(self, xs: Iterable[Element]) -> Element:
        """Meet of a family; the empty meet is the top element."""
        result = self.top
        for x in xs:
            self.check(x)
            result &= x
        return result

    def join_all(self, xs: Iterable[Element]) -> Element:
        """Join of a family; the empty join is the bottom element."""
        result = 0
        for x in xs:
            self.check(x)
            result |= x
        return result

    def atom(self, name: str) -> Element:
        try:
            return 1 << self.atoms.index(name)
        except ValueError:
            raise DomainError(
                f"unknown atom {name!r}; expected one of {list(self.atoms)}"
            ) from None

    def encode(self, names: Iterable[str]) -> Element:
        """Element whose atoms are ``names``."""
        result = 0
        for name in names:
            result |= self.atom(name)
        return result

    def decode(self, x: Element) -> list[str]:
        """Sorted atom names below ``x``."""
        self.check(x)
        return sorted(a for i, a in enumerate(self.atoms) if x >> i & 1)


TWO = FiniteBooleanAlgebra(atoms=("1",))


def is_boolean_hom(
    source: FiniteBooleanAlgebra,
    target: FiniteBooleanAlgebra,
    table: Sequence[Element],
) -> bool:
    """Check that ``table`` preserves 0, meets, joins and complements."""
    if len(table) != source.size:
        return False
    if not all(target.contains(y) for y in table):
        return False
    if table[0] != target.bottom:
        return False
    top = target.top
    for x in source.elements():
        if table[source.top ^ x] != top ^ table[x]:
            return False
        for y in range(x + 1, source.size):
            if table[x & y] != table[x] & table[y]:
                return False
            if table[x | y] != table[x] | table[y]:
                return False
    return True


class BooleanHom(BaseModel):
    """A structure-preserving map between finite Boolean algebras."""

    model_config = ConfigDict(frozen=True)

    source: FiniteBooleanAlgebra
    target: FiniteBooleanAlgebra
    table: tuple[Element, ...]

    @model_validator(mode="after")
    def _preserves_structure(self) -> Self:
        if not is_boolean_hom(self.source, self.target, self.table):
            raise ValueError(
                "map does not preserve the Boolean structure: "
                f"{list(self.table)}"
            )
        return self

    def __call__(self, x: Element) -> Element:
        self.source.check(x)
        return self.table[x]

    @classmethod
    def identity(cls, algebra: FiniteBooleanAlgebra) -> "BooleanHom":
        return cls(
            source=algebra, target=algebra, table=tuple(algebra.elements())
        )

    @classmethod
    def from_atom_images(
        cls,
        source: FiniteBooleanAlgebra,
        target: FiniteBooleanAlgebra,
        images: Sequence[Element],
    ) -> "BooleanHom":
        """Extend an assignment of target elements to the source atoms.

        Raises:
            ValueError: If the extension is not a Boolean hom, i.e. the
                images are not pairwise disjoint or do not join to 1.
        """
        return cls(
            source=source,
            target=target,
            table=_extend_atom_images(source, images),
        )

    def then(self, other: "BooleanHom") -> "BooleanHom":
        """Composite ``other ∘ self``."""
        if other.source != self.target:
            raise DomainError("homs are not composable")
        return BooleanHom(
            source=self.source,
            target=other.target,
            table=tuple(other.table[y] for y in self.table),
        )

    def preimage(self, y: Element) -> frozenset[Element]:
        self.target.check(y)
        return frozenset(x for x, v in enumerate(self.table) if v == y)

    def as_anchor(self) -> "Anchor":
        """A hom into 2, read as an order-preserving map (an anchor)."""
        if self.target.n != 1:
            raise DomainError("only homs into 2 are anchors")
        return Anchor(algebra=self.source, upset=self.preimage(1))


def _extend_atom_images(
    source: FiniteBooleanAlgebra, images: Sequence[Element]
) -> tuple[Element, ...]:
    if len(images) != source.n:
        raise DomainError(
            f"expected {source.n} atom images, got {len(images)}"
        )
    table = [0] * source.size
    for x in range(1, source.size):
        low = x & -x
        table[x] = table[x ^ low] | images[low.bit_length() - 1]
    return tuple(table)


def enumerate_homs(
    source: FiniteBooleanAlgebra, target: FiniteBooleanAlgebra
) -> Iterator[BooleanHom]:
    """All homs ``source → target``.

    A hom is fixed by its values on the atoms, so only the
    ``|target| ** n`` join-preserving extensions are checked.
    """
    for images in itertools.product(target.elements(), repeat=source.n):
        table = _extend_atom_images(source, images)
        if is_boolean_hom(source, target, table):
            yield BooleanHom.model_construct(
                source=source, target=target, table=table
            )


def count_homs_by_tables(
    source: FiniteBooleanAlgebra, target: FiniteBooleanAlgebra
) -> int:
    """Count homs by checking every function between the carriers."""
    return sum(
        is_boolean_hom(source, target, table)
        for table in itertools.product(target.elements(), repeat=source.size)
    )


def initial_arrow(algebra: FiniteBooleanAlgebra) -> BooleanHom:
    """The unique hom ``2 → algebra`` sending 0 to 0 and 1 to 1.

    On algebras with at most three atoms uniqueness is re-checked by
    enumerating every function ``2 → algebra``.
    """
    if algebra.n <= 3 and count_homs_by_tables(TWO, algebra) != 1:
        raise DomainError("2 is not initial for this algebra")
    return BooleanHom(source=TWO, target=algebra, table=(0, algebra.top))


class Anchor(BaseModel):
    """An order-preserving map ``a: B → 2`` with a(0)=0 and a(1)=1.

    Stored as the up-set ``a⁻¹(1)``.
    """

    model_config = ConfigDict(frozen=True)

    algebra: FiniteBooleanAlgebra
    upset: frozenset[Element]

    @model_validator(mode="after")
    def _monotone_with_endpoints(self) -> Self:
        algebra = self.algebra
        for x in self.upset:
            if not algebra.contains(x):
                raise ValueError(f"{x!r} is not an element of the algebra")
        if algebra.bottom in self.upset:
            raise ValueError("an anchor must send 0 to 0")
        if algebra.top not in self.upset:
            raise ValueError("an anchor must send 1 to 1")
        for x in self.upset:
            for i in range(algebra.n):
                if (x | 1 << i) not in self.upset:
                    raise ValueError(
                        "anchor up-set is not upward closed at "
                        f"{algebra.decode(x)}"
                    )
        return self

    def __call__(self, x: Element) -> int:
        self.algebra.check(x)
        return 1 if x in self.upset else 0

    @classmethod
    def generated_by(
        cls, algebra: FiniteBooleanAlgebra, minimal: Iterable[Element]
    ) -> "Anchor":
        """The anchor whose up-set is everything above ``minimal``."""
        minimal = list(minimal)
        algebra.check(*minimal)
        upset = frozenset(
            y
            for y in algebra.elements()
            if any(x & y == x for x in minimal)
        )
        return cls(algebra=algebra, upset=upset | {algebra.top})

    def is_hom(self) -> bool:
        table = tuple(self(x) for x in self.algebra.elements())
        return is_boolean_hom(self.algebra, TWO, table)


def _monotone_masks(n: int) -> list[int]:
    """Up-sets of the lattice of ``n`` atoms as bitmasks over elements.

    A monotone map on 2^n splits into the halves below and above the
    last atom; the pair is monotone iff both halves are and the lower
    half is pointwise below the upper one.
    """
    masks = [0b0, 0b1]
    for k in range(n):
        shift = 1 << k
        masks = [
            low | high << shift
            for low in masks
            for high in masks
            if low & ~high == 0
        ]
    return masks


def enumerate_anchors(
    algebra: FiniteBooleanAlgebra, max_atoms: int = DEFAULT_MAX_ATOMS
) -> tuple[Anchor, ...]:
    """The set 𝒜_B of all anchors on ``algebra``.

    Raises:
        CapacityError: If the algebra has more than ``max_atoms`` atoms.
    """
    if algebra.n > max_atoms:
        raise CapacityError(
            f"cannot enumerate anchors of an algebra with {algebra.n} atoms",
            max_atoms,
        )
    anchors = []
    for mask in _monotone_masks(algebra.n):
        if mask & 1 or not mask >> algebra.top & 1:
            continue
        upset = frozenset(x for x in algebra.elements() if mask >> x & 1)
        anchors.append(Anchor.model_construct(algebra=algebra, upset=upset))
    logger.debug(
        "enumerated %d anchors over %d atoms", len(anchors), algebra.n
    )
    return tuple(anchors)


def is_filter(algebra: FiniteBooleanAlgebra, s: Iterable[Element]) -> bool:
    """Proper filter: non-empty, up-closed, meet-closed, without 0."""
    s = frozenset(s)
    algebra.check(*s)
    if not s or algebra.bottom in s:
        return False
    for x in s:
        for y in algebra.elements():
            if x & y == x and y not in s:
                return False
        for y in s:
            if x & y not in s:
                return False
    return True


def is_ideal(algebra: FiniteBooleanAlgebra, s: Iterable[Element]) -> bool:
    """Proper ideal: non-empty, down-closed, join-closed, without 1."""
    return is_filter(algebra, (algebra.top ^ x for x in s))


def is_ultrafilter(
    algebra: FiniteBooleanAlgebra, s: Iterable[Element]
) -> bool:
    """Whether ``s`` is a filter containing exactly one of x, ¬x for all x.

    Args:
        algebra: The ambient algebra
        s: Candidate set of elements

    Returns:
        bool: True when ``s`` is an ultrafilter of ``algebra``
    """
    s = frozenset(s)
    if not is_filter(algebra, s):
        return False
    return all(
        (x in s) != (algebra.top ^ x in s) for x in algebra.elements()
    )


def is_prime_ideal(
    algebra: FiniteBooleanAlgebra, s: Iterable[Element]
) -> bool:
    """Whether ``s`` is an ideal containing exactly one of x, ¬x for all x.

    Args:
        algebra: The ambient algebra
        s: Candidate set of elements

    Returns:
        bool: True when ``s`` is a prime ideal of ``algebra``
    """
    s = frozenset(s)
    if not is_ideal(algebra, s):
        return False
    return all(
        (x in s) != (algebra.top ^ x in s) for x in algebra.elements()
    )


def principal_ultrafilter(
    algebra: FiniteBooleanAlgebra, atom: str
) -> frozenset[Element]:
    """The elements above ``atom``; every ultrafilter is one of these."""
    bit = algebra.atom(atom)
    return frozenset(x for x in algebra.elements() if x & bit)
