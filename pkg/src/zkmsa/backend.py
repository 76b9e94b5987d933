"""Setup / prove / verify over compiled constraint systems.

Two backends share one interface:

``DevBackend``
    Dependency-free and always available. Its proofs carry the whole
    witness and verification re-checks every constraint, so it is neither
    succinct nor zero-knowledge. It exists to exercise the pipeline.

``ExternalBackend``
    Delegates to an outside prover (for example a Groth16 toolchain) through
    a small command protocol over the JSON exports of the circuit and the
    witness. See :class:`ExternalBackend` for the protocol.

Keys and proofs serialize either to bytes (4-byte backend tag, then
length-prefixed fields) or to a JSON envelope with a base64 payload.
"""

from __future__ import annotations

import base64
import hashlib
import json
import os
import shlex
import struct
import subprocess
import tempfile
import zlib
from dataclasses import dataclass
from pathlib import Path

from zkmsa.field import FieldError, from_decimal
from zkmsa.r1cs import ConstraintSystem, Witness, WitnessError, check_satisfied


class BackendError(Exception):
    pass


class KeyMismatch(BackendError):
    pass


def fingerprint(cs: ConstraintSystem) -> str:
    return hashlib.sha256(cs.to_json().encode()).hexdigest()


def public_values_of(cs: ConstraintSystem, w: Witness) -> tuple[int, ...]:
    return tuple(w[s] for s in cs.public_inputs) + tuple(w[s] for s in cs.outputs)


def _pack(*fields: bytes) -> bytes:
    return b"".join(struct.pack(">I", len(f)) + f for f in fields)


def _unpack(data: bytes, count: int) -> list[bytes]:
    out, pos = [], 0
    for _ in range(count):
        if pos + 4 > len(data):
            raise BackendError("truncated artifact")
        (n,) = struct.unpack_from(">I", data, pos)
        pos += 4
        if pos + n > len(data):
            raise BackendError("truncated artifact")
        out.append(data[pos:pos + n])
        pos += n
    if pos != len(data):
        raise BackendError("trailing bytes in artifact")
    return out


def _parse_values(raw) -> tuple[int, ...]:
    try:
        return tuple(int(from_decimal(v)) for v in raw)
    except (FieldError, TypeError) as exc:
        raise BackendError(f"bad public value: {exc}") from exc


@dataclass(frozen=True)
class ProvingKey:
    backend: str
    fingerprint: str
    payload: bytes

    def to_bytes(self) -> bytes:
        return _tag(self.backend) + _pack(self.fingerprint.encode(), self.payload)

    @classmethod
    def from_bytes(cls, data: bytes) -> ProvingKey:
        name = _name(data[:4])
        fp, payload = _unpack(data[4:], 2)
        return cls(name, fp.decode(), payload)

    def to_json(self) -> str:
        return json.dumps({
            "backend": self.backend,
            "fingerprint": self.fingerprint,
            "payload": base64.b64encode(self.payload).decode(),
        })

    @classmethod
    def from_json(cls, text: str) -> ProvingKey:
        doc = _load_envelope(text)
        return cls(doc["backend"], doc["fingerprint"], _b64(doc["payload"]))


@dataclass(frozen=True)
class VerifyingKey:
    backend: str
    fingerprint: str
    num_public: int
    payload: bytes

    def to_bytes(self) -> bytes:
        return _tag(self.backend) + _pack(
            self.fingerprint.encode(), struct.pack(">I", self.num_public), self.payload
        )

    @classmethod
    def from_bytes(cls, data: bytes) -> VerifyingKey:
        name = _name(data[:4])
        fp, count, payload = _unpack(data[4:], 3)
        return cls(name, fp.decode(), struct.unpack(">I", count)[0], payload)

    def to_json(self) -> str:
        return json.dumps({
            "backend": self.backend,
            "fingerprint": self.fingerprint,
            "num_public": self.num_public,
            "payload": base64.b64encode(self.payload).decode(),
        })

    @classmethod
    def from_json(cls, text: str) -> VerifyingKey:
        doc = _load_envelope(text)
        try:
            num_public = int(doc["num_public"])
        except (KeyError, TypeError, ValueError) as exc:
            raise BackendError("verifying key lacks num_public") from exc
        return cls(doc["backend"], doc["fingerprint"], num_public, _b64(doc["payload"]))


@dataclass(frozen=True)
class Proof:
    backend: str
    fingerprint: str
    public_values: tuple[int, ...]
    payload: bytes

    def to_bytes(self) -> bytes:
        values = json.dumps([str(v) for v in self.public_values]).encode()
        return _tag(self.backend) + _pack(self.fingerprint.encode(), values, self.payload)

    @classmethod
    def from_bytes(cls, data: bytes) -> Proof:
        name = _name(data[:4])
        fp, values, payload = _unpack(data[4:], 3)
        return cls(name, fp.decode(), _parse_values(json.loads(values)), payload)

    def to_json(self) -> str:
        return json.dumps({
            "backend": self.backend,
            "fingerprint": self.fingerprint,
            "public_values": [str(v) for v in self.public_values],
            "payload": base64.b64encode(self.payload).decode(),
        })

    @classmethod
    def from_json(cls, text: str) -> Proof:
        doc = _load_envelope(text)
        if not isinstance(doc.get("public_values"), list):
            raise BackendError("proof envelope lacks public_values")
        return cls(doc["backend"], doc["fingerprint"], _parse_values(doc["public_values"]), _b64(doc["payload"]))


def _load_envelope(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise BackendError(f"not a JSON envelope: {exc}") from exc
    if not isinstance(doc, dict):
        raise BackendError("envelope must be a JSON object")
    for key in ("backend", "fingerprint", "payload"):
        if not isinstance(doc.get(key), str):
            raise BackendError(f"envelope field {key!r} missing or not a string")
    return doc


def _b64(text: str) -> bytes:
    try:
        return base64.b64decode(text, validate=True)
    except ValueError as exc:
        raise BackendError("payload is not base64") from exc


class Backend:
    name = ""
    tag = b""
    description = ""

    def setup(self, cs: ConstraintSystem, entropy: bytes) -> tuple[ProvingKey, VerifyingKey]:
        raise NotImplementedError

    def prove(self, pk: ProvingKey, cs: ConstraintSystem, w: Witness) -> Proof:
        raise NotImplementedError

    def verify(self, vk: VerifyingKey, public_values, proof: Proof) -> bool:
        raise NotImplementedError

    def _check_pk(self, pk: ProvingKey, cs: ConstraintSystem) -> str:
        if pk.backend != self.name:
            raise KeyMismatch(f"proving key is for backend {pk.backend!r}")
        fp = fingerprint(cs)
        if pk.fingerprint != fp:
            raise KeyMismatch("proving key was set up for a different circuit")
        return fp

    def _check_verify_args(self, vk: VerifyingKey, public_values, proof: Proof) -> tuple[int, ...]:
        values = tuple(int(v) for v in public_values)
        if len(values) != vk.num_public:
            raise BackendError(f"expected {vk.num_public} public values, got {len(values)}")
        if vk.backend != self.name or proof.backend != self.name:
            raise KeyMismatch("key or proof belongs to another backend")
        return values


class DevBackend(Backend):
    name = "dev"
    tag = b"DEV1"
    description = (
        "development backend: proofs embed the full witness and verification "
        "re-checks every constraint; NOT zero-knowledge and NOT succinct"
    )

    def __init__(self):
        self._circuits: dict[str, ConstraintSystem] = {}

    def setup(self, cs, entropy):
        fp = fingerprint(cs)
        secret = hashlib.sha256(b"zkmsa-dev-pk" + bytes(entropy) + fp.encode()).digest()
        key_id = hashlib.sha256(secret).digest()
        circuit = zlib.compress(cs.to_json().encode())
        num_public = len(cs.public_inputs) + len(cs.outputs)
        return ProvingKey(self.name, fp, secret), VerifyingKey(self.name, fp, num_public, key_id + circuit)

    def prove(self, pk, cs, w):
        fp = self._check_pk(pk, cs)
        try:
            ok = check_satisfied(cs, w)
        except WitnessError as exc:
            raise BackendError(str(exc)) from exc
        if not ok:
            raise BackendError("witness does not satisfy the circuit")
        key_id = hashlib.sha256(pk.payload).digest()
        body = zlib.compress(w.to_json().encode())
        return Proof(self.name, fp, public_values_of(cs, w), key_id + body)

    def _circuit(self, vk: VerifyingKey) -> ConstraintSystem:
        cs = self._circuits.get(vk.fingerprint)
        if cs is None:
            try:
                cs = ConstraintSystem.from_json(zlib.decompress(vk.payload[32:]).decode())
            except (zlib.error, ValueError) as exc:
                raise BackendError("corrupt verifying key") from exc
            if fingerprint(cs) != vk.fingerprint:
                raise BackendError("verifying key circuit does not match its fingerprint")
            self._circuits[vk.fingerprint] = cs
        return cs

    def verify(self, vk, public_values, proof):
        values = self._check_verify_args(vk, public_values, proof)
        if proof.fingerprint != vk.fingerprint or proof.payload[:32] != vk.payload[:32]:
            return False
        cs = self._circuit(vk)
        try:
            w = Witness.from_json(zlib.decompress(proof.payload[32:]).decode())
        except (zlib.error, ValueError):
            return False
        if len(w) != cs.num_signals:
            return False
        if public_values_of(cs, w) != values or tuple(proof.public_values) != values:
            return False
        return check_satisfied(cs, w)


class ExternalBackend(Backend):
    """Adapter for an outside prover driven by a command line.

    The command (``ZKMSA_EXTERNAL_PROVER`` or the constructor argument) is
    invoked as::

        CMD setup  CIRCUIT.json ENTROPY_HEX PK_OUT VK_OUT
        CMD prove  CIRCUIT.json PK WITNESS.json PROOF_OUT
        CMD verify VK PUBLIC.json PROOF

    where circuit and witness files are the JSON exports, PUBLIC.json is a
    list of decimal strings and the key/proof files are opaque. ``verify``
    exits 0 to accept and 1 to reject; any other status is an error.
    """

    name = "external"
    tag = b"EXT1"
    description = "external prover adapter (zero-knowledge properties are those of the wrapped prover)"

    def __init__(self, command: str | None = None):
        command = command or os.environ.get("ZKMSA_EXTERNAL_PROVER")
        if not command:
            raise BackendError("no external prover configured (set ZKMSA_EXTERNAL_PROVER)")
        self.command = shlex.split(command)

    def _run(self, *args: str) -> int:
        proc = subprocess.run([*self.command, *args], capture_output=True, text=True)
        if proc.returncode not in (0, 1):
            raise BackendError(f"external prover failed: {proc.stderr.strip()}")
        return proc.returncode

    def setup(self, cs, entropy):
        fp = fingerprint(cs)
        with tempfile.TemporaryDirectory() as tmp:
            d = Path(tmp)
            (d / "circuit.json").write_text(cs.to_json())
            if self._run("setup", str(d / "circuit.json"), bytes(entropy).hex(), str(d / "pk"), str(d / "vk")):
                raise BackendError("external setup rejected the circuit")
            pk, vk = (d / "pk").read_bytes(), (d / "vk").read_bytes()
        num_public = len(cs.public_inputs) + len(cs.outputs)
        return ProvingKey(self.name, fp, pk), VerifyingKey(self.name, fp, num_public, vk)

    def prove(self, pk, cs, w):
        fp = self._check_pk(pk, cs)
        if not check_satisfied(cs, w):
            raise BackendError("witness does not satisfy the circuit")
        with tempfile.TemporaryDirectory() as tmp:
            d = Path(tmp)
            (d / "circuit.json").write_text(cs.to_json())
            (d / "pk").write_bytes(pk.payload)
            (d / "witness.json").write_text(w.to_json())
            if self._run("prove", str(d / "circuit.json"), str(d / "pk"), str(d / "witness.json"), str(d / "proof")):
                raise BackendError("external prover refused the witness")
            payload = (d / "proof").read_bytes()
        return Proof(self.name, fp, public_values_of(cs, w), payload)

    def verify(self, vk, public_values, proof):
        values = self._check_verify_args(vk, public_values, proof)
        if proof.fingerprint != vk.fingerprint or tuple(proof.public_values) != values:
            return False
        with tempfile.TemporaryDirectory() as tmp:
            d = Path(tmp)
            (d / "vk").write_bytes(vk.payload)
            (d / "public.json").write_text(json.dumps([str(v) for v in values]))
            (d / "proof").write_bytes(proof.payload)
            return self._run("verify", str(d / "vk"), str(d / "public.json"), str(d / "proof")) == 0


_BACKENDS = {"dev": DevBackend, "external": ExternalBackend}
_TAGS = {cls.tag: name for name, cls in _BACKENDS.items()}


def _tag(name: str) -> bytes:
    try:
        return _BACKENDS[name].tag
    except KeyError:
        raise BackendError(f"unknown backend {name!r}") from None


def _name(tag: bytes) -> str:
    try:
        return _TAGS[bytes(tag)]
    except KeyError:
        raise BackendError(f"unknown backend tag {bytes(tag)!r}") from None


_shared_dev = DevBackend()


def get_backend(name: str = "dev", **kwargs) -> Backend:
    if name == "dev" and not kwargs:
        return _shared_dev
    try:
        cls = _BACKENDS[name]
    except KeyError:
        raise BackendError(f"unknown backend {name!r}") from None
    return cls(**kwargs)


def setup(cs: ConstraintSystem, entropy: bytes, backend: str = "dev"):
    return get_backend(backend).setup(cs, entropy)


def prove(pk: ProvingKey, cs: ConstraintSystem, w: Witness) -> Proof:
    return get_backend(pk.backend).prove(pk, cs, w)


def verify(vk: VerifyingKey, public_values, proof: Proof) -> bool:
    return get_backend(vk.backend).verify(vk, public_values, proof)
