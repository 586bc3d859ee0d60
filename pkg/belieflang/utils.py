import os
from fractions import Fraction

from inflection import pluralize

from belieflang.boolalg import DEFAULT_MAX_ATOMS

MAX_EXACT_DENOMINATOR = 10**6


def resolve_max_atoms(max_atoms: int | None = None) -> int:
    """Anchor-enumeration bound: explicit value, environment, default.

    Args:
        max_atoms: Explicit bound; wins over everything else when set

    Returns:
        int: The bound, read from ``BELIEFLANG_MAX_ATOMS`` when no
        explicit value is given and the variable is set

    Raises:
        ValueError: If the environment variable is not a positive integer
    """
    if max_atoms is not None:
        return max_atoms
    raw = os.getenv("BELIEFLANG_MAX_ATOMS")
    if not raw:
        return DEFAULT_MAX_ATOMS
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(
            f"BELIEFLANG_MAX_ATOMS must be an integer, got {raw!r}"
        ) from None
    if value < 1:
        raise ValueError("BELIEFLANG_MAX_ATOMS must be positive")
    return value


def format_value(value: float, exact: bool = False) -> str:
    """Render a truth value or real for reports.

    Twelve significant digits by default. With ``exact`` the closest
    ``p/q`` with ``q <= 10**6`` is printed instead when it converts back
    to the same float. It is recovered from the float alone, so ``0.1``
    prints as ``1/10`` although the binary value is not one tenth.
    """
    if value == 0:
        value = 0.0
    if exact:
        fraction = Fraction(value).limit_denominator(MAX_EXACT_DENOMINATOR)
        if float(fraction) == value:
            return str(fraction)
    return format(value, ".12g")


def count_noun(count: int, noun: str) -> str:
    """``3 agents``, ``1 time``."""
    return f"{count} {noun if count == 1 else pluralize(noun)}"
