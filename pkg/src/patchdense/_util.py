import re

_DIGITS = re.compile(r"(\d+)")


def natural_key(s):
    """Sort key that orders ``C2`` before ``C10``."""
    return tuple(int(p) if p.isdigit() else p for p in _DIGITS.split(str(s)))


def sort_ids(items):
    return sorted(items, key=natural_key)


def fmt_set(items):
    return "{" + ",".join(sort_ids(items)) + "}"


def popcount(m: int) -> int:
    return bin(m).count("1")


def bits(m: int):
    i = 0
    while m:
        if m & 1:
            yield i
        m >>= 1
        i += 1
