"""Length-prefixed framing for stdio and tcp transports.

Grammar (bit-exact): ``Content-Length: <n>\\r\\n\\r\\n`` followed by exactly
``n`` bytes of UTF-8 body. Anything else is a framing error.
"""

from __future__ import annotations

import re
from typing import BinaryIO

HEADER_RE = re.compile(rb"^Content-Length: (0|[1-9][0-9]*)\r\n\r\n")
MAX_FRAME = 64 * 1024 * 1024


class FramingError(ValueError):
    pass


def encode_frame(body: bytes) -> bytes:
    return b"Content-Length: %d\r\n\r\n%s" % (len(body), body)


def decode_frame(data: bytes) -> tuple[bytes, bytes]:
    """Decode one frame from ``data``; returns (body, remainder).

    Raises FramingError if the prefix violates the grammar or the declared
    length exceeds the available bytes' declared frame.
    """
    m = HEADER_RE.match(data)
    if not m:
        raise FramingError("malformed frame header")
    length = int(m.group(1))
    if length > MAX_FRAME:
        raise FramingError(f"frame too large: {length}")
    start = m.end()
    if len(data) < start + length:
        raise FramingError("truncated frame body")
    return data[start : start + length], data[start + length :]


def try_decode(buffer: bytes) -> tuple[str, bytes, bytes]:
    """Incremental decode: returns ("ok", body, rest), ("incomplete", b"", buffer)
    when more bytes may complete a valid frame, or ("error", b"", buffer)."""
    idx = buffer.find(b"\r\n\r\n", 0, 64)
    if idx < 0:
        if len(buffer) < 64 and _is_header_prefix(buffer):
            return ("incomplete", b"", buffer)
        return ("error", b"", buffer)
    header = buffer[: idx + 4]
    m = HEADER_RE.match(header)
    if not m or m.end() != len(header):
        return ("error", b"", buffer)
    length = int(m.group(1))
    if length > MAX_FRAME:
        return ("error", b"", buffer)
    end = len(header) + length
    if len(buffer) < end:
        return ("incomplete", b"", buffer)
    return ("ok", buffer[len(header) : end], buffer[end:])


_HEADER_PREFIX = b"Content-Length: "


def _is_header_prefix(buffer: bytes) -> bool:
    head = buffer[: len(_HEADER_PREFIX)]
    if not _HEADER_PREFIX.startswith(head) and not head.startswith(_HEADER_PREFIX):
        return False
    tail = buffer[len(_HEADER_PREFIX) :]
    return bool(re.match(rb"^(0|[1-9][0-9]*)?(\r(\n(\r)?)?)?$", tail))


def read_frame(stream: BinaryIO) -> bytes | None:
    """Read one frame from a blocking byte stream; None on clean EOF."""
    header = b""
    while not header.endswith(b"\r\n\r\n"):
        byte = stream.read(1)
        if not byte:
            if header:
                raise FramingError("EOF inside frame header")
            return None
        header += byte
        if len(header) > 64:
            raise FramingError("oversized frame header")
    m = HEADER_RE.match(header)
    if not m or m.end() != len(header):
        raise FramingError("malformed frame header")
    length = int(m.group(1))
    if length > MAX_FRAME:
        raise FramingError(f"frame too large: {length}")
    body = b""
    while len(body) < length:
        chunk = stream.read(length - len(body))
        if not chunk:
            raise FramingError("EOF inside frame body")
        body += chunk
    return body


def write_frame(stream: BinaryIO, body: bytes) -> None:
    stream.write(encode_frame(body))
    stream.flush()
