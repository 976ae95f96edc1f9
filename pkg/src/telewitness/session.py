"""Two-party orchestration: Alice and Bob exchange one classical bit per
round over an in-process or TCP transport, with full transcripts.

Wire protocol (UTF-8, one record per line, ``\\n`` terminated): each line
is ``field=value`` pairs separated by single spaces, always starting with
``kind round sender``.  Kinds and their extra fields:

    session_config   d witness state shots seed     (sender referee)
    branch_bit       bit                            (sender alice)
    outcome_report   outcome                        (sender bob)
    session_end      rounds [mean stderr]           (sender referee)

Values are tokens without spaces, so no escaping is needed (file-based
state paths containing spaces cannot cross the wire).

A transcript file is the same lines prefixed by a ``transcript-version=1``
header.

The referee -- the deterministic simulation kernel holding the global
state -- cannot be split across processes, so each role holds a replica
rebuilt from the session config; replicas agree because every sampled
quantity is a pure function of (config, round index).  Parties still
interact only through measurement requests and the classical bit, and the
only protocol-level communication is Alice's per-round bit; Bob's outcome
report exists for bookkeeping and transcript symmetry.
"""

from __future__ import annotations

import queue
import socket
import threading
from dataclasses import dataclass, field
from pathlib import Path

from .fileio import parse_state_spec, parse_witness_spec
from .sampling import Estimate, ProtocolSampler, UniformStream, estimate_from_outcomes

TRANSCRIPT_HEADER = "transcript-version=1"
DEFAULT_TIMEOUT = 10.0

SENDER_ALICE = "alice"
SENDER_BOB = "bob"
SENDER_REFEREE = "referee"

_KIND_FIELDS = {
    "session_config": ("d", "witness", "state", "shots", "seed"),
    "branch_bit": ("bit",),
    "outcome_report": ("outcome",),
    "session_end": ("rounds",),
}
_OPTIONAL_FIELDS = {"session_end": ("mean", "stderr")}


class SessionError(RuntimeError):
    """Protocol-level failure (config mismatch, bad sequencing)."""


class TransportError(SessionError):
    """Connection, timeout, or mid-session disconnect failure."""


class DecodeError(ValueError):
    """Malformed wire line; the message names the offending field."""


@dataclass(frozen=True)
class RoundMessage:
    """One wire record."""

    kind: str
    round: int
    sender: str
    payload: dict[str, str] = field(default_factory=dict)

    def bit(self) -> int:
        return int(self.payload["bit"])

    def outcome(self) -> float:
        return float(self.payload["outcome"])


def encode_message(msg: RoundMessage) -> str:
    """Render one newline-terminated wire line with canonical field order."""
    if msg.kind not in _KIND_FIELDS:
        raise ValueError(f"unknown message kind {msg.kind!r}")
    parts = [f"kind={msg.kind}", f"round={msg.round}", f"sender={msg.sender}"]
    names = _KIND_FIELDS[msg.kind] + _OPTIONAL_FIELDS.get(msg.kind, ())
    for name in names:
        if name in msg.payload:
            parts.append(f"{name}={msg.payload[name]}")
    for name in _KIND_FIELDS[msg.kind]:
        if name not in msg.payload:
            raise ValueError(f"message kind {msg.kind} requires field {name!r}")
    return " ".join(parts) + "\n"


def decode_message(line: str) -> RoundMessage:
    """Parse one wire line back into a RoundMessage."""
    stripped = line.rstrip("\n")
    if not stripped:
        raise DecodeError("empty line")
    fields: dict[str, str] = {}
    for token in stripped.split(" "):
        key, sep, value = token.partition("=")
        if not sep or not key:
            raise DecodeError(f"malformed field {token!r}")
        if key in fields:
            raise DecodeError(f"duplicate field {key!r}")
        fields[key] = value
    for required in ("kind", "round", "sender"):
        if required not in fields:
            raise DecodeError(f"missing field {required!r}")
    kind = fields.pop("kind")
    if kind not in _KIND_FIELDS:
        raise DecodeError(f"unknown kind {kind!r}")
    try:
        rnd = int(fields.pop("round"))
    except ValueError:
        raise DecodeError("field 'round' must be an integer") from None
    sender = fields.pop("sender")
    for name in _KIND_FIELDS[kind]:
        if name not in fields:
            raise DecodeError(f"kind {kind} is missing field {name!r}")
    allowed = set(_KIND_FIELDS[kind]) | set(_OPTIONAL_FIELDS.get(kind, ()))
    for name in fields:
        if name not in allowed:
            raise DecodeError(f"unexpected field {name!r} for kind {kind}")
    if "bit" in fields and fields["bit"] not in ("0", "1"):
        raise DecodeError(f"field 'bit' must be 0 or 1, got {fields['bit']!r}")
    for name in ("outcome", "mean", "stderr"):
        if name in fields:
            try:
                float(fields[name])
            except ValueError:
                raise DecodeError(f"field {name!r} must be a float") from None
    return RoundMessage(kind, rnd, sender, fields)


@dataclass(frozen=True)
class SessionConfig:
    """Parameters both parties must agree on."""

    d: int
    witness: str
    state: str
    shots: int
    seed: int

    def to_message(self) -> RoundMessage:
        payload = {
            "d": str(self.d),
            "witness": self.witness,
            "state": self.state,
            "shots": str(self.shots),
            "seed": str(self.seed),
        }
        return RoundMessage("session_config", 0, SENDER_REFEREE, payload)

    @classmethod
    def from_message(cls, msg: RoundMessage) -> "SessionConfig":
        if msg.kind != "session_config":
            raise SessionError(f"expected session_config, got {msg.kind}")
        p = msg.payload
        return cls(int(p["d"]), p["witness"], p["state"], int(p["shots"]), int(p["seed"]))


class SessionKernel:
    """Referee replica: the simulated global state plus the shot RNG.

    Every query is a pure function of (config, round index), so replicas
    on both ends of a transport stay consistent without coordination.
    """

    def __init__(self, config: SessionConfig, tol: float = 1e-10):
        self.config = config
        state = parse_state_spec(config.state, config.d, tol)
        wit = parse_witness_spec(config.witness, config.d, tol)
        if state.dims is None:
            raise ValueError("session states must be bipartite")
        self._sampler = ProtocolSampler(state, wit, config.d)
        self._stream = UniformStream(config.seed)
        self.analytic_value = self._sampler.analytic
        self.p0 = self._sampler.p0

    def branch_bit(self, round_index: int) -> int:
        u = self._stream.rows(round_index, round_index + 1)[0, 0]
        return int(u >= self.p0)

    def outcome(self, round_index: int, bit: int) -> float:
        if bit not in (0, 1):
            raise ValueError(f"bit must be 0 or 1, got {bit}")
        u = self._stream.rows(round_index, round_index + 1)[0, 1]
        return float(self._sampler.samplers[bit].lookup([u])[0])


@dataclass(frozen=True)
class SessionRound:
    index: int
    bit: int
    outcome: float


@dataclass
class SessionTranscript:
    """Ordered record of everything that crossed the transport."""

    config: SessionConfig
    messages: list[RoundMessage]
    rounds: list[SessionRound]
    estimate: Estimate | None
    complete: bool

    def to_lines(self) -> list[str]:
        return [TRANSCRIPT_HEADER] + [encode_message(m).rstrip("\n") for m in self.messages]

    def to_text(self) -> str:
        return "\n".join(self.to_lines()) + "\n"


def write_transcript(path, transcript: SessionTranscript) -> None:
    Path(path).write_text(transcript.to_text(), encoding="utf-8")


def read_transcript(path) -> SessionTranscript:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != TRANSCRIPT_HEADER:
        raise DecodeError(f"missing transcript header {TRANSCRIPT_HEADER!r}")
    messages = [decode_message(line) for line in lines[1:] if line]
    return _assemble_transcript(messages)


def _assemble_transcript(messages: list[RoundMessage]) -> SessionTranscript:
    config = None
    bits: dict[int, int] = {}
    outs: dict[int, float] = {}
    end = None
    for msg in messages:
        if msg.kind == "session_config":
            config = SessionConfig.from_message(msg)
        elif msg.kind == "branch_bit":
            if msg.round in bits:
                raise SessionError(f"duplicate branch_bit for round {msg.round}")
            bits[msg.round] = msg.bit()
        elif msg.kind == "outcome_report":
            outs[msg.round] = msg.outcome()
        elif msg.kind == "session_end":
            end = msg
    if config is None:
        raise SessionError("transcript has no session_config")
    complete_rounds = [SessionRound(i, bits[i], outs[i]) for i in sorted(bits) if i in outs]
    for expected, r in enumerate(complete_rounds):
        if r.index != expected:
            raise SessionError(f"round indices not dense: expected {expected}, got {r.index}")
    estimate = None
    complete = end is not None and len(complete_rounds) == config.shots
    if end is not None and "mean" in end.payload:
        estimate = Estimate(
            float(end.payload["mean"]), float(end.payload["stderr"]), len(complete_rounds), config.seed
        )
    return SessionTranscript(config, messages, complete_rounds, estimate, complete)


def replay_estimate(transcript: SessionTranscript) -> Estimate | None:
    """Recompute the estimate from the recorded rounds; equals the
    recorded one exactly for a complete session."""
    if not transcript.rounds:
        return None
    return estimate_from_outcomes([r.outcome for r in transcript.rounds], transcript.config.seed)


# -- transports -------------------------------------------------------------


class InProcessEndpoint:
    """One end of a paired in-memory line channel."""

    def __init__(self, inbox: queue.Queue, outbox: queue.Queue, timeout: float = DEFAULT_TIMEOUT):
        self._inbox = inbox
        self._outbox = outbox
        self._timeout = timeout
        self._closed = False

    def send_line(self, line: str) -> None:
        if self._closed:
            raise TransportError("endpoint closed")
        self._outbox.put(line)

    def recv_line(self) -> str:
        try:
            line = self._inbox.get(timeout=self._timeout)
        except queue.Empty:
            raise TransportError("in-process receive timed out") from None
        if line is None:
            raise TransportError("peer closed the channel")
        return line

    def close(self) -> None:
        if not self._closed:
            self._closed = True
            self._outbox.put(None)


def in_process_pair(timeout: float = DEFAULT_TIMEOUT) -> tuple[InProcessEndpoint, InProcessEndpoint]:
    a_to_b: queue.Queue = queue.Queue()
    b_to_a: queue.Queue = queue.Queue()
    return InProcessEndpoint(b_to_a, a_to_b, timeout), InProcessEndpoint(a_to_b, b_to_a, timeout)


class TcpEndpoint:
    """Line framing over a connected TCP socket."""

    def __init__(self, sock: socket.socket, timeout: float = DEFAULT_TIMEOUT):
        sock.settimeout(timeout)
        self._sock = sock
        self._reader = sock.makefile("r", encoding="utf-8", newline="\n")

    def send_line(self, line: str) -> None:
        try:
            self._sock.sendall(line.encode("utf-8"))
        except OSError as exc:
            raise TransportError(f"send failed: {exc}") from exc

    def recv_line(self) -> str:
        try:
            line = self._reader.readline()
        except OSError as exc:
            raise TransportError(f"receive failed: {exc}") from exc
        if not line:
            raise TransportError("peer closed the connection")
        return line

    def close(self) -> None:
        try:
            self._reader.close()
        except OSError:
            pass
        try:
            self._sock.close()
        except OSError:
            pass


class TcpListener:
    """Bound listening socket handing out one endpoint per session."""

    def __init__(self, host: str = "127.0.0.1", port: int = 0, timeout: float = DEFAULT_TIMEOUT):
        self._timeout = timeout
        try:
            self._sock = socket.create_server((host, port))
        except OSError as exc:
            raise TransportError(f"cannot bind {host}:{port}: {exc}") from exc
        self._sock.settimeout(timeout)
        self.host, self.port = self._sock.getsockname()[:2]

    def accept(self) -> TcpEndpoint:
        try:
            conn, _ = self._sock.accept()
        except socket.timeout:
            raise TransportError("accept timed out") from None
        return TcpEndpoint(conn, self._timeout)

    def close(self) -> None:
        self._sock.close()


def tcp_connect(host: str, port: int, timeout: float = DEFAULT_TIMEOUT) -> TcpEndpoint:
    try:
        sock = socket.create_connection((host, port), timeout=timeout)
    except OSError as exc:
        raise TransportError(f"cannot connect to {host}:{port}: {exc}") from exc
    return TcpEndpoint(sock, timeout)


# -- roles ------------------------------------------------------------------


def _send(endpoint, msg: RoundMessage, log: list[RoundMessage]) -> None:
    endpoint.send_line(encode_message(msg))
    log.append(msg)


def _recv(endpoint, log: list[RoundMessage]) -> RoundMessage:
    msg = decode_message(endpoint.recv_line())
    log.append(msg)
    return msg


def run_alice(config: SessionConfig, endpoint) -> SessionTranscript:
    """Alice's loop: announce the config, then per round measure her
    spin-zero bit and ship it; collect Bob's reports; close with the
    referee summary."""
    kernel = SessionKernel(config)
    log: list[RoundMessage] = []
    outcomes: list[float] = []
    _send(endpoint, config.to_message(), log)
    try:
        for i in range(config.shots):
            bit = kernel.branch_bit(i)
            _send(endpoint, RoundMessage("branch_bit", i, SENDER_ALICE, {"bit": str(bit)}), log)
            reply = _recv(endpoint, log)
            if reply.kind != "outcome_report" or reply.round != i:
                raise SessionError(f"expected outcome_report for round {i}, got {reply}")
            outcomes.append(reply.outcome())
    except TransportError:
        return _assemble_transcript(log)
    payload = {"rounds": str(len(outcomes))}
    if outcomes:
        est = estimate_from_outcomes(outcomes, config.seed)
        payload["mean"] = repr(est.mean)
        payload["stderr"] = repr(est.stderr)
    _send(endpoint, RoundMessage("session_end", len(outcomes), SENDER_REFEREE, payload), log)
    return _assemble_transcript(log)


def run_bob(endpoint, expected_config: SessionConfig | None = None) -> SessionTranscript:
    """Bob's loop: accept the config, then per round receive Alice's bit,
    measure the matching branch observable, and report the eigenvalue."""
    log: list[RoundMessage] = []
    first = _recv(endpoint, log)
    config = SessionConfig.from_message(first)
    if expected_config is not None and config != expected_config:
        raise SessionError(f"config mismatch: expected {expected_config}, got {config}")
    kernel = SessionKernel(config)
    outcomes: list[float] = []
    try:
        for i in range(config.shots):
            msg = _recv(endpoint, log)
            if msg.kind != "branch_bit" or msg.round != i:
                raise SessionError(f"expected branch_bit for round {i}, got {msg}")
            value = kernel.outcome(i, msg.bit())
            outcomes.append(value)
            _send(endpoint, RoundMessage("outcome_report", i, SENDER_BOB, {"outcome": repr(value)}), log)
        end = _recv(endpoint, log)
    except TransportError:
        return _assemble_transcript(log)
    if end.kind != "session_end":
        raise SessionError(f"expected session_end, got {end.kind}")
    if outcomes:
        est = estimate_from_outcomes(outcomes, config.seed)
        if repr(est.mean) != end.payload.get("mean") or repr(est.stderr) != end.payload.get("stderr"):
            raise SessionError("session_end summary disagrees with replayed rounds")
    return _assemble_transcript(log)


def run_session(
    config: SessionConfig,
    transport: str = "inprocess",
    address: tuple[str, int] | None = None,
    timeout: float = DEFAULT_TIMEOUT,
) -> SessionTranscript:
    """Run a full two-party session and return the (shared) transcript.

    ``transport`` is "inprocess" or "tcp"; TCP runs a loopback pair on
    ``address`` (port 0 picks a free port).  Both roles' transcripts are
    verified identical before returning.
    """
    if transport == "inprocess":
        a_end, b_end = in_process_pair(timeout)
        result: dict[str, SessionTranscript | BaseException] = {}

        def bob():
            try:
                result["bob"] = run_bob(b_end, config)
            except BaseException as exc:  # noqa: BLE001 - rethrown below
                result["bob"] = exc
                b_end.close()

        thread = threading.Thread(target=bob, daemon=True)
        thread.start()
        alice_transcript = run_alice(config, a_end)
        thread.join(timeout)
    elif transport == "tcp":
        host, port = address or ("127.0.0.1", 0)
        listener = TcpListener(host, port, timeout)
        result = {}

        def bob():
            try:
                result["bob"] = run_bob(listener.accept(), config)
            except BaseException as exc:  # noqa: BLE001 - rethrown below
                result["bob"] = exc

        thread = threading.Thread(target=bob, daemon=True)
        thread.start()
        try:
            endpoint = tcp_connect(listener.host, listener.port, timeout)
            alice_transcript = run_alice(config, endpoint)
            endpoint.close()
        finally:
            thread.join(timeout)
            listener.close()
    else:
        raise ValueError(f"unknown transport {transport!r}")

    bob_result = result.get("bob")
    if isinstance(bob_result, BaseException):
        raise bob_result
    if bob_result is None:
        raise TransportError("bob role did not finish")
    if bob_result.to_lines() != alice_transcript.to_lines():
        raise SessionError("role transcripts diverged")
    return alice_transcript
