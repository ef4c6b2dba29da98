"""Line-oriented certificate documents.

A document is a fixed sequence of ``key: value`` lines closed by a SHA-256
checksum of everything above it::

    lsc-certificate 1
    tool-version: 0.1.0
    command: certify syndetic
    argv: ["certify", "syndetic", "--set", "res(1,3)", "--window", "1000"]
    input.set: res(1,3)
    flags: window=1000
    verdict: certified
    kind: SyndeticCert
    payload: {"certificate":{"checked_window":6,"exact":true,"gap":3},"note":""}
    witness: 3,6
    checksum: sha256:...

No clock, host or path information enters the checksummed region, so the same
command on the same inputs always yields the same bytes.
"""

from __future__ import annotations

import dataclasses
import enum
import hashlib
import json
from dataclasses import dataclass

from lsc import __version__
from lsc.errors import InputError

MAGIC = "lsc-certificate 1"


def to_plain(obj):
    """Dataclasses, enums and tuples to JSON-ready values."""
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_plain(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, (list, tuple)):
        return [to_plain(x) for x in obj]
    if isinstance(obj, (set, frozenset)):
        return sorted(to_plain(x) for x in obj)
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if hasattr(obj, "item"):
        return obj.item()
    if isinstance(obj, float) and obj == float("inf"):
        return "inf"
    return obj


def canonical_json(obj) -> str:
    return json.dumps(to_plain(obj), sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def witness_integers(cert) -> tuple[int, ...]:
    """The integers a certificate rests on, ascending and without repeats."""
    plain = to_plain(cert)
    found: set[int] = set()

    def collect(v):
        if isinstance(v, bool):
            return
        if isinstance(v, int):
            found.add(v)
        elif isinstance(v, list):
            for x in v:
                collect(x)
        elif isinstance(v, dict):
            for x in v.values():
                collect(x)

    collect(plain)
    return tuple(sorted(found))


@dataclass(frozen=True)
class CertificateDocument:
    command: str
    argv: tuple[str, ...]
    inputs: tuple[tuple[str, str], ...]
    flags: tuple[tuple[str, str], ...]
    verdict: str
    kind: str
    payload: str
    witness: tuple[int, ...]
    tool_version: str = __version__

    def body(self) -> str:
        lines = [
            MAGIC,
            f"tool-version: {self.tool_version}",
            f"command: {self.command}",
            f"argv: {json.dumps(list(self.argv), ensure_ascii=False)}",
        ]
        lines += [f"input.{k}: {v}" for k, v in self.inputs]
        lines.append("flags: " + ";".join(f"{k}={v}" for k, v in self.flags))
        lines += [
            f"verdict: {self.verdict}",
            f"kind: {self.kind}",
            f"payload: {self.payload}",
            "witness: " + ",".join(str(x) for x in self.witness),
        ]
        return "\n".join(lines) + "\n"

    @property
    def checksum(self) -> str:
        return "sha256:" + hashlib.sha256(self.body().encode("utf-8")).hexdigest()

    def render(self) -> str:
        return self.body() + f"checksum: {self.checksum}\n"

    def to_json(self) -> str:
        data = {
            "tool_version": self.tool_version,
            "command": self.command,
            "argv": list(self.argv),
            "inputs": dict(self.inputs),
            "flags": dict(self.flags),
            "verdict": self.verdict,
            "kind": self.kind,
            "payload": json.loads(self.payload),
            "witness": list(self.witness),
            "checksum": self.checksum,
        }
        return json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def make_document(command, argv, inputs, flags, verdict, kind, payload_obj, witness=None) -> CertificateDocument:
    return CertificateDocument(
        command=command,
        argv=tuple(argv),
        inputs=tuple(inputs),
        flags=tuple(sorted((k, str(v)) for k, v in flags)),
        verdict=verdict,
        kind=kind,
        payload=canonical_json(payload_obj),
        witness=tuple(witness_integers(payload_obj) if witness is None else sorted(set(int(x) for x in witness))),
    )


def parse_document(text: str) -> CertificateDocument:
    """Inverse of :meth:`CertificateDocument.render`; the checksum must match."""
    if text.lstrip().startswith("{"):
        data = json.loads(text)
        doc = CertificateDocument(
            command=data["command"],
            argv=tuple(data["argv"]),
            inputs=tuple(data["inputs"].items()),
            flags=tuple(sorted(data["flags"].items())),
            verdict=data["verdict"],
            kind=data["kind"],
            payload=canonical_json(data["payload"]),
            witness=tuple(data["witness"]),
            tool_version=data["tool_version"],
        )
        if doc.checksum != data["checksum"]:
            raise InputError("checksum mismatch")
        return doc
    lines = text.splitlines()
    if not lines or lines[0] != MAGIC:
        raise InputError("not a certificate document")
    fields: dict[str, str] = {}
    inputs = []
    for line in lines[1:]:
        key, sep, value = line.partition(": ")
        if not sep:
            key, value = line.rstrip(":"), ""
        if key.startswith("input."):
            inputs.append((key[6:], value))
        else:
            fields[key] = value
    try:
        flags = tuple(
            tuple(item.split("=", 1)) for item in fields["flags"].split(";") if item
        )
        doc = CertificateDocument(
            command=fields["command"],
            argv=tuple(json.loads(fields["argv"])),
            inputs=tuple(inputs),
            flags=flags,
            verdict=fields["verdict"],
            kind=fields["kind"],
            payload=fields["payload"],
            witness=tuple(int(x) for x in fields["witness"].split(",") if x),
            tool_version=fields["tool-version"],
        )
    except KeyError as e:
        raise InputError(f"document lacks field {e.args[0]!r}") from None
    if fields.get("checksum") != doc.checksum:
        raise InputError("checksum mismatch")
    return doc
