"""Command-line experiment runner.

Subcommands: `run` executes one contract privately (two-node garbled
session, or the outsourced path with `--outsourced`), `table1` compares
every registered contract's AND count against the reference experiment
table, `cover` reports the secure-cover probability with its Monte-Carlo
oracle, and `estimate` prints the proof-carrying-code cost model.

Exit codes: 0 success, 1 usage error, 2 verification failure, 3 protocol
abort.  All randomness derives from --seed; the OS supplies entropy only
when the flag is absent.  With --out DIR, reports land there as JSON/CSV
plus rendered figures.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time

from . import report as rpt
from .chain import ChainError, Ledger
from .circuit import emit_circuit, gate_counts
from .contracts import REGISTRY, TABLE1_NAMES, get_contract
from .cover import (
    CoverError,
    cover_secure_probability,
    mc_cover_probability,
)
from .hashing import digest_hex
from .mpcrun import EngineChoice, MpcError, run_private_contract
from .outsource import OutsourceError, nike_keygen, nike_publish, nike_setup, seccomp, upload_private_parameters
from .transport import TransportError
from .verify import (
    ContractPackage,
    SecurityProfile,
    TrustStore,
    estimate_pcc_times,
    generate_signer,
    public_hex,
    sign_package,
    verify_extended,
    verify_standard,
)
from .verify.samples import (
    ACCOUNT_SOURCE,
    CROWDFUND_GUARDED_SOURCE,
    MILLIONAIRE_SOURCE,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFICATION = 2
EXIT_PROTOCOL = 3

_WORKBENCH_SIGNER_SEED = b"privsc-workbench-signer-0001...."


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _seed_bytes(seed: int | None) -> bytes:
    if seed is None:
        return os.urandom(32)
    return seed.to_bytes(32, "big", signed=False)


_STUB_TEMPLATE = """\
class {name} {{
    // ensures \\result == \\result
    int describe(int x) {{
        return x;
    }}
}}
"""

_PACKAGE_SOURCES = {
    "millionaire": MILLIONAIRE_SOURCE,
    "crowdfund": CROWDFUND_GUARDED_SOURCE,
    "account": ACCOUNT_SOURCE,
}


def registry_package(name: str, circuit_digest: str = "") -> ContractPackage:
    """Level-2 package for contracts the mini-language expresses, level-1
    annotated stub otherwise; signed by the workbench signer."""
    source = _PACKAGE_SOURCES.get(name)
    if source is not None:
        pkg = ContractPackage(source=source, level=2,
                              circuit_digest=circuit_digest)
    else:
        camel = "".join(part.capitalize() for part in name.split("_"))
        pkg = ContractPackage(source=_STUB_TEMPLATE.format(name=camel),
                              level=1, circuit_digest=circuit_digest)
    return sign_package(pkg, "workbench", generate_signer(_WORKBENCH_SIGNER_SEED))


def workbench_trust_store() -> TrustStore:
    return TrustStore(
        {"workbench": public_hex(generate_signer(_WORKBENCH_SIGNER_SEED))})


def load_policy(path: str | None):
    """Policy file: JSON with accept_unproven, mandatory_signers,
    required_spec_ids, trust_store {id: hex}, extended flag."""
    if path is None:
        return SecurityProfile.permissive(), workbench_trust_store(), False
    with open(path) as fh:
        raw = json.load(fh)
    profile = SecurityProfile(
        mandatory_signers=frozenset(raw.get("mandatory_signers", [])),
        required_spec_ids=frozenset(raw.get("required_spec_ids", [])),
        accept_unproven=bool(raw.get("accept_unproven", True)),
    )
    trust = workbench_trust_store()
    for sid, pub in raw.get("trust_store", {}).items():
        trust.add(sid, pub)
    return profile, trust, bool(raw.get("extended", False))


def _parse_inputs(spec, text: str):
    groups = text.split(";")
    if len(groups) == 1 and spec.n_parties > 1:
        flat = [g for g in text.split(",") if g.strip()]
        per = [len(f) for f in spec.party_fields]
        if len(flat) == sum(per):
            groups = []
            pos = 0
            for n in per:
                groups.append(",".join(flat[pos : pos + n]))
                pos += n
    if len(groups) != spec.n_parties:
        raise ValueError(
            f"{spec.name} expects {spec.n_parties} ';'-separated input "
            f"groups, got {len(groups)}")
    values = []
    for fields, group in zip(spec.party_fields, groups):
        raw = [v for v in group.split(",") if v.strip()]
        if len(raw) != len(fields):
            raise ValueError(
                f"party group {group!r} must carry {len(fields)} values")
        values.append([int(v) if f.kind == "uint" else float(v)
                       for f, v in zip(fields, raw)])
    return values


def cmd_run(args) -> int:
    try:
        spec = get_contract(args.contract)
    except KeyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        values = _parse_inputs(spec, args.inputs)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    circuit = spec.circuit()
    digest = digest_hex(emit_circuit(circuit).encode())
    policy, trust, extended = load_policy(args.policy)
    pkg = registry_package(spec.name, digest)
    check = verify_extended if extended else verify_standard
    ok, reasons = check(pkg, policy, trust)
    if not ok:
        print("verification-failed:", "; ".join(reasons), file=sys.stderr)
        return EXIT_VERIFICATION

    seed = _seed_bytes(args.seed)
    inputs = spec.encode_inputs(values)
    ledger = Ledger()
    t0 = time.perf_counter()
    try:
        if args.outsourced:
            params = nike_setup(spec.n_parties + 1, spec.n_parties + 1, 128,
                                "dealer", seed=seed)
            member_ids = tuple(range(spec.n_parties + 1))
            pks = {i: nike_publish(params, i)[0] for i in member_ids}
            _, sk0 = nike_publish(params, 0)
            k_s = nike_keygen(params, 0, sk0, member_ids, pks)
            store, _ = upload_private_parameters(
                k_s, {i: bits for i, bits in enumerate(inputs)}, seed)
            out = seccomp(circuit, 0, store, k_s, seed)
            output_bits = out.output_bits
            info = {
                "mode": "outsourced",
                "messages": len(out.transcript),
                "message_bytes": out.transcript.total_bytes(),
                "and_gates": out.and_gates,
                "ledger_block": None,
            }
        else:
            engines = EngineChoice(tuple(args.engine for _ in inputs))
            result = run_private_contract(
                circuit, inputs, engines, nodes=args.nodes, ledger=ledger,
                seed=seed, quorum=args.quorum, package=pkg, policy=policy)
            output_bits = result.output_bits
            info = {
                "mode": "two-node",
                "messages": result.message_count,
                "message_bytes": result.message_bytes,
                "and_gates": result.and_gates,
                "ledger_block": result.ledger_block.digest
                if result.ledger_block else None,
                "timings": dict(result.timings),
            }
    except (MpcError, OutsourceError, TransportError, ChainError) as exc:
        print(f"protocol-abort: {exc}", file=sys.stderr)
        return EXIT_PROTOCOL

    decoded = spec.decode_outputs(output_bits)
    wall = time.perf_counter() - t0
    payload = {
        "contract": spec.name,
        "inputs": values,
        "result": decoded,
        "gate_counts": {
            "and": gate_counts(circuit).and_count,
            "xor": gate_counts(circuit).xor_count,
            "inv": gate_counts(circuit).inv_count,
        },
        "seed": args.seed,
        **info,
    }
    timings = payload.pop("timings", {})
    timings["wall_s"] = wall
    if not args.no_timings:
        payload["timings"] = timings

    names = [f.name for f in spec.output_fields]
    print(rpt.render_table(["output", "value"],
                           [[n, v] for n, v in zip(names, decoded)]))
    print(f"and_gates={payload['and_gates']} messages={payload['messages']} "
          f"bytes={payload['message_bytes']}")
    if args.out:
        rpt.write_json(os.path.join(args.out, "report.json"), payload)
        rpt.write_csv(os.path.join(args.out, "report.csv"),
                      ["output", "value"],
                      [[n, v] for n, v in zip(names, decoded)])
        if timings and not args.no_timings:
            rpt.figure_run_phases(os.path.join(args.out, "run_phases.png"),
                                  timings)
        print(f"report written to {args.out}/")
    return EXIT_OK


def cmd_table1(args) -> int:
    rows = []
    for name in TABLE1_NAMES:
        spec = get_contract(name)
        t0 = time.perf_counter()
        circuit = spec.circuit()
        build_s = time.perf_counter() - t0
        ours = gate_counts(circuit).and_count
        ref = spec.reference_and_count
        ratio = ours / ref if ref else math.nan
        rows.append([name, ours, ref if ref else "-",
                     f"{ratio:.3f}", f"{build_s:.3f}"])
    table = rpt.render_table(
        ["contract", "and_gates", "reference_and", "ratio", "build_s"], rows)
    print(table)
    if args.out:
        rpt.write_csv(os.path.join(args.out, "table1.csv"),
                      ["contract", "and_gates", "reference_and", "ratio", "build_s"],
                      rows)
        rpt.figure_gate_counts(
            os.path.join(args.out, "table1.png"),
            TABLE1_NAMES,
            [int(r[1]) for r in rows],
            [get_contract(n).reference_and_count for n in TABLE1_NAMES])
        print(f"report written to {args.out}/")
    return EXIT_OK


def _cover_row(n_e, n_o, t_e, t_o, fan_out, trials, seed):
    closed = cover_secure_probability(n_e, n_o, t_e, t_o, fan_out)
    est, lo, hi = mc_cover_probability(n_e, n_o, t_e, t_o, fan_out,
                                       trials, seed)
    sigma = math.sqrt(max(closed.value * (1 - closed.value), 1e-12) / trials)
    agree = abs(est - closed.value) <= 3 * sigma + 2e-3
    return {
        "n_e": n_e, "n_o": n_o, "t_e": t_e, "t_o": t_o, "fan_out": fan_out,
        "closed_form": closed.value, "fallback": closed.used_fallback,
        "mc_estimate": est, "ci_low": lo, "ci_high": hi,
        "agree_3sigma": agree,
    }


def cmd_cover(args) -> int:
    trials = args.trials
    try:
        if args.sweep:
            import random as _random

            rng = _random.Random(args.seed or 0)
            rows = []
            for n_e in range(2, 9):
                for n_o in range(1, 5):
                    c = math.ceil(n_e / n_o)
                    if c > n_e:
                        continue
                    for _ in range(2):
                        fan_out = rng.randint(c, n_e)
                        t_e = rng.randrange(n_e)
                        t_o = rng.randrange(n_o)
                        rows.append(_cover_row(n_e, n_o, t_e, t_o, fan_out,
                                               trials, args.seed or 0))
        else:
            rows = [_cover_row(args.ne, args.no, args.te, args.to, args.l,
                               trials, args.seed or 0)]
    except CoverError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    headers = ["n_e", "n_o", "t_e", "t_o", "fan_out", "closed_form",
               "mc_estimate", "ci_low", "ci_high", "agree_3sigma"]
    table_rows = [[r["n_e"], r["n_o"], r["t_e"], r["t_o"], r["fan_out"],
                   f"{r['closed_form']:.6f}", f"{r['mc_estimate']:.6f}",
                   f"{r['ci_low']:.6f}", f"{r['ci_high']:.6f}",
                   "yes" if r["agree_3sigma"] else "NO"] for r in rows]
    print(rpt.render_table(headers, table_rows))
    disagree = [r for r in rows if not r["agree_3sigma"]]
    print(f"{len(rows) - len(disagree)}/{len(rows)} rows agree within 3 sigma")
    if args.out:
        rpt.write_csv(os.path.join(args.out, "cover.csv"), headers, table_rows)
        rpt.figure_cover_sweep(os.path.join(args.out, "cover.png"), rows)
        print(f"report written to {args.out}/")
    return EXIT_OK if not disagree else EXIT_PROTOCOL


def cmd_estimate(args) -> int:
    if args.bs < 0:
        print("error: bytecode size must be nonnegative", file=sys.stderr)
        return EXIT_USAGE
    est = estimate_pcc_times(args.bs)
    rows = [["proof_generation_s", f"{est.gen_seconds:.6f}"],
            ["proof_verification_s", f"{est.verify_seconds:.6f}"],
            ["certified_size_bytes", est.certified_size_bytes]]
    print(rpt.render_table(["quantity", "value"], rows))
    if args.out:
        rpt.write_csv(os.path.join(args.out, "estimate.csv"),
                      ["quantity", "value"], rows)
        rpt.figure_pcc_curves(os.path.join(args.out, "estimate.png"),
                              args.bs or 1500)
        print(f"report written to {args.out}/")
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="privsc",
                     description="private & verifiable smart-contract lab")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute one contract privately")
    run.add_argument("--contract", required=True,
                     help=f"one of: {', '.join(sorted(REGISTRY))}")
    run.add_argument("--inputs", required=True,
                     help="per-party groups 'a,b;c,d' (or flat commas)")
    run.add_argument("--engine", default="yao_semi_honest")
    run.add_argument("--nodes", type=int, default=2)
    run.add_argument("--quorum", type=int, default=None)
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--policy", default=None, help="policy JSON file")
    run.add_argument("--out", default=None, help="report directory")
    run.add_argument("--outsourced", action="store_true",
                     help="run the server-aided offline-parties path")
    run.add_argument("--no-timings", action="store_true",
                     help="omit timings for byte-stable reports")
    run.set_defaults(func=cmd_run)

    t1 = sub.add_parser("table1", help="gate counts vs the reference table")
    t1.add_argument("--out", default=None)
    t1.set_defaults(func=cmd_table1)

    cov = sub.add_parser("cover", help="secure-cover probability report")
    cov.add_argument("--ne", type=int, default=4)
    cov.add_argument("--no", type=int, default=2)
    cov.add_argument("--te", type=int, default=3)
    cov.add_argument("--to", type=int, default=1)
    cov.add_argument("--l", type=int, default=2)
    cov.add_argument("--trials", type=int, default=100_000)
    cov.add_argument("--seed", type=int, default=None)
    cov.add_argument("--sweep", action="store_true")
    cov.add_argument("--out", default=None)
    cov.set_defaults(func=cmd_cover)

    est = sub.add_parser("estimate", help="proof-carrying-code cost model")
    est.add_argument("--bs", type=int, required=True, help="bytecode size")
    est.add_argument("--out", default=None)
    est.set_defaults(func=cmd_estimate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
