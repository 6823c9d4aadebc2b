"""Integer conventions used everywhere: binary length, sign tests, branching."""


def length(x: int) -> int:
    """Binary length of |x|, with length(0) == 0."""
    return abs(x).bit_length()


def sg(x: int) -> int:
    return 1 if x > 0 else 0


def cosg(x: int) -> int:
    """1 iff x == 0, written as (1 - sg(x)) * (1 - sg(-x))."""
    return (1 - sg(x)) * (1 - sg(-x))


def ifz(c: int, y: int, z: int) -> int:
    """y when c == 0, z otherwise."""
    return z + cosg(c) * (y - z)


def ifnz(c: int, y: int, z: int) -> int:
    """y when c != 0, z otherwise; the literal y + cosg(c)*(z - y) form."""
    return y + cosg(c) * (z - y)


def pow2(n: int) -> int:
    """2**n for n >= 0 and 0 for negative n (a right shift past the unit bit)."""
    return 1 << n if n >= 0 else 0


def to_signpair(x: int) -> tuple[int, int]:
    """Encode x as (s, n) with x == (-1)**s * n; zero is always (0, 0)."""
    return (1, -x) if x < 0 else (0, x)


def from_signpair(pair: tuple[int, int]) -> int:
    s, n = pair
    if s not in (0, 1) or n < 0:
        raise ValueError(f"not a sign pair: {pair!r}")
    return -n if s else n


def bits(values) -> int:
    """Largest binary length over an iterable of integers (0 when empty)."""
    return max(map(int.bit_length, map(abs, values)), default=0)
