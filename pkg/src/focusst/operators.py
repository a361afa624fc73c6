"""Operators over timed-stream prefixes: granularity change, time stamps, filtering."""
from __future__ import annotations

import enum
import warnings
from typing import Iterable

from .errors import InvalidArgument, InvalidGranularity, TypeMismatch
from .stream import Message, TimedStreamPrefix


class SplitPolicy(enum.Enum):
    FIRST = "first"
    LAST = "last"
    DISTRIBUTE = "distribute"


class RaggedJoinWarning(UserWarning):
    """join() met a prefix whose length is not a multiple of the factor."""


def _split_block(iv: tuple, n: int, policy: SplitPolicy) -> list:
    if policy is SplitPolicy.FIRST:
        return [iv] + [()] * (n - 1)
    if policy is SplitPolicy.LAST:
        return [()] * (n - 1) + [iv]
    # message i goes to sub-interval min(i, n - 1)
    head = [(v,) for v in iv[:n - 1]]
    head += [()] * (n - 1 - len(head))
    return head + [iv[n - 1:]]


def split(s: TimedStreamPrefix, n: int, policy: SplitPolicy = SplitPolicy.FIRST) -> TimedStreamPrefix:
    """Refine the time granularity: every interval becomes ``n`` intervals."""
    if n < 1:
        raise InvalidGranularity(f"split factor must be >= 1, got {n}")
    policy = SplitPolicy(policy)
    if n == 1:
        return s
    out = []
    for iv in s.intervals:
        out.extend(_split_block(iv, n, policy))
    return s.with_intervals(out)


def join_checked(s: TimedStreamPrefix, n: int) -> tuple[TimedStreamPrefix, bool]:
    """Coarsen the granularity by ``n``; also report whether the tail was ragged.

    A trailing block shorter than ``n`` intervals is joined as-is into one
    final interval and the returned flag is True.
    """
    if n < 1:
        raise InvalidGranularity(f"join factor must be >= 1, got {n}")
    ivs = s.intervals
    out = []
    for start in range(0, len(ivs), n):
        block = ivs[start:start + n]
        out.append(tuple(v for iv in block for v in iv))
    return s.with_intervals(out), len(ivs) % n != 0


def join(s: TimedStreamPrefix, n: int) -> TimedStreamPrefix:
    """Join every ``n`` consecutive intervals of ``s`` into one."""
    result, padded = join_checked(s, n)
    if padded:
        warnings.warn(
            f"join by {n} of a prefix of length {len(s)}: last interval joins "
            f"{len(s) % n} source intervals", RaggedJoinWarning, stacklevel=2)
    return result


def timestamp(s: TimedStreamPrefix, k: int) -> int | None:
    """Index of the interval carrying the ``k``-th message (counting from 1).

    Returns None when ``s`` holds fewer than ``k`` messages.
    """
    if k < 1:
        raise InvalidArgument(f"messages are counted from 1, got k={k}")
    seen = 0
    for t, iv in enumerate(s.intervals):
        seen += len(iv)
        if seen >= k:
            return t
    return None


def filter_stream(M: Iterable[Message], s: TimedStreamPrefix) -> TimedStreamPrefix:
    """Keep, in every interval, only the messages that belong to ``M``."""
    keep = set()
    for m in M:
        if m.type != s.element_type:
            raise TypeMismatch(f"filter set member {m} has type {m.type}, stream carries {s.element_type}")
        keep.add(m.value)
    return s.with_intervals(tuple(v for v in iv if v in keep) for iv in s.intervals)
