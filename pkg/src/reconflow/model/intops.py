"""32-bit two's-complement integer helpers."""

MASK = 0xFFFFFFFF
INT_MIN = -(1 << 31)
INT_MAX = (1 << 31) - 1


def wrap32(v: int) -> int:
    v &= MASK
    return v - (1 << 32) if v & 0x80000000 else v


def div32(a: int, b: int) -> int:
    """Signed division truncating toward zero; caller traps b == 0."""
    q = abs(a) // abs(b)
    if (a < 0) != (b < 0):
        q = -q
    return wrap32(q)


def force_bit(v: int, bit: int, stuck_one: bool) -> int:
    u = v & MASK
    u = u | (1 << bit) if stuck_one else u & ~(1 << bit)
    return wrap32(u)
