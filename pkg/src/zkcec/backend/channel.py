"""Framed two-party channels with a rolling transcript hash.

Frame: 4-byte little-endian payload length, 1-byte tag, payload.  Both ends
hash every frame (sent or received) in stream order, so honest parties hold
identical transcripts at every point.
"""

from __future__ import annotations

import hashlib
import queue
import socket
import struct
import time
from enum import IntEnum

from ..errors import ProtocolAbort, TransportError

_LEN = struct.Struct("<IB")
MAX_FRAME = 1 << 31


class Tag(IntEnum):
    HELLO = 1
    COMMIT_DELTA = 2
    OPEN = 3
    CHAL = 4
    ECHO = 5
    MULPROOF = 6
    ZERO = 7
    ROM_SELECT = 8
    INDEX_MAP = 9
    CODES = 10
    CHECKPOINT = 11
    VERDICT = 12
    ABORT = 13


class Channel:
    """Base class: subclasses implement _send_raw/_recv_raw on whole frames."""

    def __init__(self, timeout: float = 600.0):
        self.timeout = timeout
        self._h = hashlib.blake2b(digest_size=32, person=b"zkcec-transcript")
        self.bytes_sent = 0
        self.bytes_recv = 0
        self.msgs_sent = 0
        self.msgs_recv = 0
        self.view = None          # optional list recording received frames

    def digest(self) -> bytes:
        return self._h.copy().digest()

    def _absorb(self, tag: int, payload: bytes):
        self._h.update(_LEN.pack(len(payload), tag))
        self._h.update(payload)

    def send(self, tag: Tag, payload: bytes = b""):
        if len(payload) >= MAX_FRAME:
            raise TransportError("frame too large")
        frame = _LEN.pack(len(payload), int(tag)) + payload
        self._send_raw(frame)
        self._absorb(int(tag), payload)
        self.bytes_sent += len(frame)
        self.msgs_sent += 1

    def recv(self, expect: Tag = None) -> bytes:
        tag, payload = self._recv_frame()
        self.bytes_recv += _LEN.size + len(payload)
        self.msgs_recv += 1
        if self.view is not None:
            self.view.append((Tag(tag) if tag in Tag._value2member_map_ else tag, payload))
        if tag == Tag.ABORT:
            phase, _, reason = payload.decode("utf-8", "replace").partition("|")
            raise ProtocolAbort(phase, "peer aborted: " + reason)
        self._absorb(tag, payload)
        if expect is not None and tag != expect:
            name = Tag(tag).name if tag in Tag._value2member_map_ else str(tag)
            raise ProtocolAbort("framing", f"expected {expect.name}, got {name}")
        return payload

    def abort(self, phase: str, reason: str = ""):
        try:
            frame_payload = f"{phase}|{reason}".encode()
            self._send_raw(_LEN.pack(len(frame_payload), int(Tag.ABORT)) + frame_payload)
        except Exception:
            pass

    def close(self):
        pass


class LocalChannel(Channel):
    """One end of an in-process duplex pipe."""

    def __init__(self, inbox: queue.Queue, outbox: queue.Queue, timeout=600.0):
        super().__init__(timeout)
        self.inbox, self.outbox = inbox, outbox

    def _send_raw(self, frame: bytes):
        self.outbox.put(frame)

    def _recv_frame(self):
        try:
            frame = self.inbox.get(timeout=self.timeout)
        except queue.Empty:
            raise TransportError("timed out waiting for peer") from None
        if frame is None:
            raise TransportError("peer closed the channel")
        n, tag = _LEN.unpack_from(frame)
        if len(frame) != _LEN.size + n:
            raise TransportError("frame length mismatch")
        return tag, frame[_LEN.size:]

    def close(self):
        self.outbox.put(None)


def local_pair(timeout: float = 600.0):
    a, b = queue.Queue(), queue.Queue()
    return LocalChannel(a, b, timeout), LocalChannel(b, a, timeout)


class SocketChannel(Channel):
    def __init__(self, sock: socket.socket, timeout=600.0):
        super().__init__(timeout)
        self.sock = sock
        sock.settimeout(timeout)
        sock.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)

    def _send_raw(self, frame: bytes):
        try:
            self.sock.sendall(frame)
        except OSError as e:
            raise TransportError(f"send failed: {e}") from None

    def _read_exact(self, n: int) -> bytes:
        buf = bytearray()
        while len(buf) < n:
            try:
                chunk = self.sock.recv(min(n - len(buf), 1 << 20))
            except OSError as e:
                raise TransportError(f"receive failed: {e}") from None
            if not chunk:
                raise TransportError("connection closed by peer")
            buf += chunk
        return bytes(buf)

    def _recv_frame(self):
        n, tag = _LEN.unpack(self._read_exact(_LEN.size))
        return tag, self._read_exact(n)

    def close(self):
        try:
            self.sock.close()
        except OSError:
            pass


def parse_endpoint(text: str):
    host, _, port = text.rpartition(":")
    if not host or not port.isdigit():
        raise ValueError(f"endpoint must be host:port, got {text!r}")
    return host, int(port)


def listen(endpoint: str, timeout: float = 600.0) -> SocketChannel:
    host, port = parse_endpoint(endpoint)
    srv = socket.create_server((host, port))
    srv.settimeout(timeout)
    try:
        conn, _ = srv.accept()
    except OSError as e:
        raise TransportError(f"no peer connected: {e}") from None
    finally:
        srv.close()
    return SocketChannel(conn, timeout)


def connect(endpoint: str, timeout: float = 600.0, retries: int = 50) -> SocketChannel:
    host, port = parse_endpoint(endpoint)
    last = None
    for _ in range(retries):
        try:
            return SocketChannel(socket.create_connection((host, port), timeout=timeout), timeout)
        except OSError as e:
            last = e
            time.sleep(0.1)
    raise TransportError(f"could not connect to {endpoint}: {last}")


class TamperChannel(Channel):
    """Wraps a channel and flips one byte of the n-th outgoing payload."""

    def __init__(self, inner: Channel, frame_no: int, byte_no: int = 0, mask: int = 1):
        super().__init__(inner.timeout)
        self.inner = inner
        self.frame_no = frame_no
        self.byte_no = byte_no
        self.mask = mask
        self._count = 0

    def _send_raw(self, frame: bytes):
        if self._count == self.frame_no and len(frame) > _LEN.size:
            b = bytearray(frame)
            pos = _LEN.size + self.byte_no % (len(frame) - _LEN.size)
            b[pos] ^= self.mask
            frame = bytes(b)
        self._count += 1
        self.inner._send_raw(frame)

    def _recv_frame(self):
        return self.inner._recv_frame()

    def close(self):
        self.inner.close()
