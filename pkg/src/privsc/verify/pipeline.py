"""Contract packages, verification levels, certificates and policies.

Levels: 1 annotated + signed, 2 annotations hold under randomized
testing, 3 embedded verification conditions regenerate and discharge,
4 a signed certificate binds the conditions to the source.  Standard
verification dispatches on the package's level and then applies the
caller's policy; extended verification additionally demands signatures
from every mandatory trusted signer and coverage of the required
specification tags, which is what blocks unsigned or non-conforming
contracts from running.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field, replace

from cryptography.exceptions import InvalidSignature
from cryptography.hazmat.primitives.asymmetric.ed25519 import (
    Ed25519PrivateKey,
    Ed25519PublicKey,
)

from ..hashing import digest_hex
from .lang import (
    Annotation,
    ClassDecl,
    ExecutionError,
    InvariantViolation,
    LangError,
    eval_expr,
    parse_annotations,
    run_method,
)
from .vcgen import (
    VC,
    DEFAULT_BOUND,
    DischargeTranscript,
    discharge_bounded,
    gen_vcs,
)


class PackageError(Exception):
    pass


@dataclass(frozen=True)
class ProofSection:
    vc_digests: tuple[str, ...]
    transcripts: tuple[DischargeTranscript, ...]

    def tags(self) -> tuple[str, ...]:
        return tuple(t.tag for t in self.transcripts)


@dataclass(frozen=True)
class Certificate:
    vc_digests: tuple[str, ...]
    transcripts: tuple[DischargeTranscript, ...]
    source_digest: str
    signer: str
    signature: str = ""
    size_bytes: int = 0

    def body_bytes(self) -> bytes:
        return json.dumps({
            "vcs": list(self.vc_digests),
            "transcripts": [t.to_json() for t in self.transcripts],
            "source": self.source_digest,
            "signer": self.signer,
        }, sort_keys=True).encode()


@dataclass(frozen=True)
class ContractPackage:
    source: str
    level: int
    circuit_digest: str = ""
    proofs: ProofSection | None = None
    certificate: Certificate | None = None
    signatures: tuple[tuple[str, str], ...] = ()

    def __post_init__(self) -> None:
        if not (1 <= self.level <= 4):
            raise PackageError("level must be 1..4")
        if self.level >= 3 and self.proofs is None:
            raise PackageError("level >= 3 requires embedded proofs")
        if self.level == 4 and self.certificate is None:
            raise PackageError("level 4 requires a certificate")

    def digest(self) -> str:
        body = json.dumps({
            "source": self.source,
            "level": self.level,
            "circuit": self.circuit_digest,
            "vcs": list(self.proofs.vc_digests) if self.proofs else [],
        }, sort_keys=True).encode()
        return digest_hex(body)

    def parsed(self) -> tuple[ClassDecl, list[Annotation]]:
        return parse_annotations(self.source)


@dataclass(frozen=True)
class SecurityProfile:
    mandatory_signers: frozenset[str] = frozenset()
    required_spec_ids: frozenset[str] = frozenset()
    accept_unproven: bool = True

    @classmethod
    def permissive(cls) -> "SecurityProfile":
        return cls()


PERMISSIVE = SecurityProfile.permissive()


# --- signatures and the trust store -----------------------------------------


def generate_signer(seed: bytes | None = None) -> Ed25519PrivateKey:
    if seed is not None:
        return Ed25519PrivateKey.from_private_bytes(seed[:32].ljust(32, b"\x00"))
    return Ed25519PrivateKey.generate()


def public_hex(key: Ed25519PrivateKey) -> str:
    from cryptography.hazmat.primitives import serialization

    return key.public_key().public_bytes(
        serialization.Encoding.Raw, serialization.PublicFormat.Raw).hex()


def sign_package(pkg: ContractPackage, signer_id: str,
                 key: Ed25519PrivateKey) -> ContractPackage:
    sig = key.sign(bytes.fromhex(pkg.digest())).hex()
    return replace(pkg, signatures=pkg.signatures + ((signer_id, sig),))


@dataclass
class TrustStore:
    keys: dict[str, str] = field(default_factory=dict)  # signer id -> pub hex

    def add(self, signer_id: str, pub_hex: str) -> None:
        self.keys[signer_id] = pub_hex

    def check(self, pkg: ContractPackage, signer_id: str) -> bool:
        pub = self.keys.get(signer_id)
        if pub is None:
            return False
        digest = bytes.fromhex(pkg.digest())
        for sid, sig in pkg.signatures:
            if sid != signer_id:
                continue
            try:
                Ed25519PublicKey.from_public_bytes(
                    bytes.fromhex(pub)).verify(bytes.fromhex(sig), digest)
                return True
            except InvalidSignature:
                continue
        return False

    def export_text(self) -> str:
        return "".join(f"{sid} {pub}\n" for sid, pub in sorted(self.keys.items()))

    @classmethod
    def import_text(cls, text: str) -> "TrustStore":
        store = cls()
        for line in text.splitlines():
            if line.strip():
                sid, pub = line.split()
                store.add(sid, pub)
        return store


# --- level checks -------------------------------------------------------------


@dataclass(frozen=True)
class Counterexample:
    method: str
    annotation: str
    fields: dict
    args: dict
    observed: int | None


@dataclass(frozen=True)
class Level2Report:
    passed: bool
    samples_run: int
    counterexample: Counterexample | None
    starved: tuple[str, ...] = ()  # methods whose preconditions never sampled


def _literal_pool(cls: ClassDecl) -> list[int]:
    pool = {0, 1, -1}
    text_literals = [init for _, init in cls.fields if init is not None]
    for v in text_literals:
        pool.update({v, v - 1, v + 1})
    return sorted(pool)


def _sample_value(rng, pool, span):
    if rng.random() < 0.3:
        return rng.choice(pool)
    return rng.randint(-span, span)


def check_level2(pkg: ContractPackage, budget: int = 1000,
                 seed: int = 0, span: int = 2000) -> Level2Report:
    """Randomized annotation testing: sample inputs satisfying every
    requires clause (rejection plus boundary values), execute, and check
    ensures and class/loop invariants."""
    cls, _ = pkg.parsed()
    rng = random.Random(seed)
    pool = _literal_pool(cls)
    starved = []
    samples = 0
    for method in cls.methods:
        accepted = 0
        for _ in range(budget):
            fields = {}
            for fname, init in cls.fields:
                fields[fname] = init if init is not None else \
                    _sample_value(rng, pool, span)
            args = {}
            array_len = None
            for p in method.params:
                if not p.is_array:
                    args[p.name] = _sample_value(rng, pool, span)
            for p in method.params:
                if p.is_array:
                    if array_len is None:
                        ints = [v for v in args.values() if isinstance(v, int)]
                        array_len = min(8, max(0, ints[0] if ints else 4))
                    args[p.name] = [_sample_value(rng, pool, span)
                                    for _ in range(array_len)]
            env = dict(fields)
            env.update(args)
            try:
                pre_ok = all(eval_expr(a.expr, env, old=env)
                             for a in method.requires)
                inv_ok = all(eval_expr(a.expr, env, old=env)
                             for a in cls.invariants)
            except ExecutionError:
                continue
            if not (pre_ok and inv_ok):
                continue
            accepted += 1
            samples += 1
            old = dict(env)
            try:
                result, post_fields = run_method(cls, method, fields, args)
            except InvariantViolation as violation:
                return Level2Report(False, samples, Counterexample(
                    method.name, violation.annotation.text, fields, args,
                    None))
            except ExecutionError:
                continue
            post_env = dict(post_fields)
            post_env.update(args)
            for annot in list(method.ensures) + list(cls.invariants):
                try:
                    ok = eval_expr(annot.expr, post_env, old=old, result=result)
                except ExecutionError:
                    continue
                if not ok:
                    return Level2Report(False, samples, Counterexample(
                        method.name, annot.text, fields, args, result))
        if accepted == 0 and (method.requires or cls.invariants):
            starved.append(method.name)
    return Level2Report(True, samples, None, tuple(starved))


def check_level3(pkg: ContractPackage) -> tuple[bool, list[str]]:
    """Regenerate VCs from source and compare against the embedded ones;
    every transcript must be discharged."""
    if pkg.proofs is None:
        return False, ["no embedded proofs"]
    cls, _ = pkg.parsed()
    vcs = gen_vcs(cls)
    digests = tuple(vc.digest() for vc in vcs)
    reasons = []
    if digests != pkg.proofs.vc_digests:
        reasons.append("regenerated VCs differ from embedded ones")
    by_digest = {t.vc_digest: t for t in pkg.proofs.transcripts}
    for vc in vcs:
        t = by_digest.get(vc.digest())
        if t is None:
            reasons.append(f"missing transcript for {vc.tag}")
        elif not t.discharged:
            reasons.append(f"undischarged VC {vc.tag}: {t.counterexample}")
    return not reasons, reasons


def make_certificate(pkg: ContractPackage, signer_id: str,
                     key: Ed25519PrivateKey) -> Certificate:
    """Bind the package's VC digests and transcripts to its source."""
    if pkg.proofs is None:
        raise PackageError("certificates require level-3 proofs")
    cert = Certificate(
        vc_digests=pkg.proofs.vc_digests,
        transcripts=pkg.proofs.transcripts,
        source_digest=digest_hex(pkg.source.encode()),
        signer=signer_id,
    )
    body = cert.body_bytes()
    sig = key.sign(body).hex()
    return replace(cert, signature=sig,
                   size_bytes=len(body) + len(sig) // 2)


def check_certificate(pkg: ContractPackage, trust: TrustStore | None = None
                      ) -> tuple[bool, list[str]]:
    """Recompute the certificate bindings and verify its signature."""
    cert = pkg.certificate
    if cert is None:
        return False, ["no certificate"]
    reasons = []
    if cert.source_digest != digest_hex(pkg.source.encode()):
        reasons.append("certificate bound to different source")
    else:
        try:
            cls, _ = pkg.parsed()
            digests = tuple(vc.digest() for vc in gen_vcs(cls))
            if digests != cert.vc_digests:
                reasons.append("certificate VC digests do not match source")
        except LangError as exc:
            reasons.append(f"source fails to parse: {exc}")
    if not all(t.discharged for t in cert.transcripts):
        reasons.append("certificate carries undischarged VCs")
    if trust is not None:
        pub = trust.keys.get(cert.signer)
        if pub is None:
            reasons.append(f"certificate signer {cert.signer!r} untrusted")
        else:
            try:
                Ed25519PublicKey.from_public_bytes(
                    bytes.fromhex(pub)).verify(
                        bytes.fromhex(cert.signature), cert.body_bytes())
            except InvalidSignature:
                reasons.append("certificate signature invalid")
    elif not cert.signature:
        reasons.append("certificate unsigned")
    return not reasons, reasons


def build_proved_package(source: str, level: int = 3,
                         circuit_digest: str = "",
                         bound: int = DEFAULT_BOUND) -> ContractPackage:
    """Convenience constructor: parse, generate VCs, discharge, embed."""
    cls, _ = parse_annotations(source)
    vcs = gen_vcs(cls)
    transcripts = discharge_bounded(vcs, bound=bound)
    proofs = ProofSection(
        vc_digests=tuple(vc.digest() for vc in vcs),
        transcripts=tuple(transcripts))
    return ContractPackage(source=source, level=level,
                           circuit_digest=circuit_digest, proofs=proofs)


# --- standard and extended verification ---------------------------------------


def verify_standard(pkg: ContractPackage, policy: SecurityProfile | None = None,
                    trust: TrustStore | None = None, budget: int = 1000,
                    seed: int = 0) -> tuple[bool, list[str]]:
    """Protocol: check signatures/annotations/proofs/certificate by level,
    then apply the local policy."""
    policy = policy or PERMISSIVE
    reasons: list[str] = []
    try:
        pkg.parsed()
    except LangError as exc:
        return False, [f"source fails to parse: {exc}"]
    if pkg.level == 1:
        if not pkg.signatures:
            reasons.append("level-1 package carries no signature")
        elif trust is not None and not any(
                trust.check(pkg, sid) for sid, _ in pkg.signatures):
            reasons.append("no signature verifies under the trust store")
    elif pkg.level == 2:
        report = check_level2(pkg, budget=budget, seed=seed)
        if not report.passed:
            ce = report.counterexample
            reasons.append(
                f"annotation testing failed: {ce.method}: {ce.annotation} "
                f"with fields={ce.fields} args={ce.args} -> {ce.observed}")
        if report.starved:
            reasons.append(
                "budget exhausted without satisfying preconditions for: "
                + ", ".join(report.starved))
    elif pkg.level == 3:
        ok, why = check_level3(pkg)
        reasons.extend(why)
    else:
        ok, why = check_certificate(pkg, trust)
        reasons.extend(why)
    if not policy.accept_unproven and pkg.level < 3:
        reasons.append("policy rejects packages without proofs")
    return not reasons, reasons


def verify_extended(pkg: ContractPackage, policy: SecurityProfile,
                    trust: TrustStore, budget: int = 1000,
                    seed: int = 0) -> tuple[bool, list[str]]:
    """Standard verification plus mandatory trusted signatures and
    required specification coverage."""
    ok, reasons = verify_standard(pkg, policy, trust, budget, seed)
    for signer in sorted(policy.mandatory_signers):
        if not trust.check(pkg, signer):
            reasons.append(f"missing-trusted-signature:{signer}")
    if policy.required_spec_ids:
        proved = set()
        if pkg.proofs is not None:
            proved = {t.tag for t in pkg.proofs.transcripts if t.discharged}
        for spec_id in sorted(policy.required_spec_ids):
            if spec_id not in proved:
                reasons.append(f"missing-required-spec:{spec_id}")
    return not reasons, reasons


# --- PCC cost estimators -------------------------------------------------------


@dataclass(frozen=True)
class PccEstimate:
    gen_seconds: float
    verify_seconds: float
    certified_size_bytes: int


def estimate_pcc_times(bytecode_size: int) -> PccEstimate:
    """Proof generation 1.5 + bs/1500 s, verification 0.25 + bs/6000 s,
    certified artifact 1.30x the bytecode."""
    if bytecode_size < 0:
        raise ValueError("bytecode size must be nonnegative")
    return PccEstimate(
        gen_seconds=1.5 + bytecode_size / 1500,
        verify_seconds=0.25 + bytecode_size / 6000,
        certified_size_bytes=(bytecode_size * 13 + 5) // 10,
    )


# --- package file format --------------------------------------------------------


def export_package(pkg: ContractPackage) -> str:
    head = {
        "level": pkg.level,
        "circuit": pkg.circuit_digest,
        "digest": pkg.digest(),
        "signatures": [list(s) for s in pkg.signatures],
    }
    parts = ["PKG1 " + json.dumps(head, sort_keys=True),
             "--- source ---", pkg.source.rstrip("\n")]
    if pkg.proofs is not None:
        parts.append("--- proofs ---")
        parts.append(json.dumps(list(pkg.proofs.vc_digests)))
        parts.extend(t.to_json() for t in pkg.proofs.transcripts)
    if pkg.certificate is not None:
        c = pkg.certificate
        parts.append("--- certificate ---")
        parts.append(json.dumps({
            "vcs": list(c.vc_digests), "source": c.source_digest,
            "signer": c.signer, "signature": c.signature,
            "size": c.size_bytes,
            "transcripts": [t.to_json() for t in c.transcripts],
        }, sort_keys=True))
    return "\n".join(parts) + "\n"


def import_package(text: str) -> ContractPackage:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("PKG1 "):
        raise PackageError("bad package header")
    head = json.loads(lines[0][5:])
    sections: dict[str, list[str]] = {}
    current = None
    for line in lines[1:]:
        if line.startswith("--- ") and line.endswith(" ---"):
            current = line[4:-4]
            sections[current] = []
        elif current is not None:
            sections[current].append(line)
    if "source" not in sections:
        raise PackageError("package missing source section")
    source = "\n".join(sections["source"]) + "\n"
    proofs = None
    if "proofs" in sections:
        rows = sections["proofs"]
        proofs = ProofSection(
            vc_digests=tuple(json.loads(rows[0])),
            transcripts=tuple(DischargeTranscript.from_json(r)
                              for r in rows[1:] if r.strip()))
    certificate = None
    if "certificate" in sections:
        d = json.loads("\n".join(sections["certificate"]))
        certificate = Certificate(
            vc_digests=tuple(d["vcs"]),
            transcripts=tuple(DischargeTranscript.from_json(r)
                              for r in d["transcripts"]),
            source_digest=d["source"], signer=d["signer"],
            signature=d["signature"], size_bytes=d["size"])
    pkg = ContractPackage(
        source=source, level=head["level"], circuit_digest=head["circuit"],
        proofs=proofs, certificate=certificate,
        signatures=tuple((s, sig) for s, sig in head["signatures"]))
    if pkg.digest() != head["digest"]:
        raise PackageError("package digest mismatch")
    return pkg
