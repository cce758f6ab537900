import math
import time


FNV_OFFSET_BASIS = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3
_MASK_64 = 0xFFFFFFFFFFFFFFFF


def generate_timestamp():
    """
    Return a millisecond float timestamp from the monotonic clock.
    """
    return time.perf_counter() * 10**3


def elapsed_millis(started):
    return generate_timestamp() - started


def fnv1a_64(data: bytes) -> str:
    """
    64-bit FNV-1a digest of data as 16 lowercase hex digits.
    """
    digest = FNV_OFFSET_BASIS
    for byte in data:
        digest ^= byte
        digest = (digest * FNV_PRIME) & _MASK_64
    return f"{digest:016x}"


def vocab_fingerprint(entities, relations) -> str:
    """
    Fingerprint of a vocabulary: FNV-1a over the sorted entity names, a record
    separator, then the sorted relation names, newline-joined.
    """
    payload = "\n".join(sorted(entities)) + "\x1e" + "\n".join(sorted(relations))
    return fnv1a_64(payload.encode("utf-8"))


def round_half_away(value: float) -> int:
    """
    Round to the nearest integer, ties away from zero.
    """
    if value >= 0:
        return int(math.floor(value + 0.5))
    return -int(math.floor(-value + 0.5))
