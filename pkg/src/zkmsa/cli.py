"""Command-line front end.

Exit codes are shared by every command: 0 valid/verified, 1 invalid or
rejected, 2 usage or format error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict
from itertools import product

from zkmsa import backend as zk_backend
from zkmsa import oracle
from zkmsa.field import decode_signed
from zkmsa.files import instance_from_fasta, instance_to_json, load_instance, read_fasta
from zkmsa.msa_circuit import (
    DNA,
    PROTEIN,
    Alphabet,
    CircuitParams,
    EncodingError,
    VisibilityMask,
    build_main,
    encode_instance,
    params_of,
)
from zkmsa.r1cs import CircuitError, ConstraintSystem, Witness, stats, synthesize_witness

EXIT_OK, EXIT_INVALID, EXIT_USAGE = 0, 1, 2

SWEEP_COLUMNS = ["nseq", "seq_len", "aln_len", "nonlinear", "linear", "wires"]


class UsageError(Exception):
    pass


def _alphabet(spec: str) -> Alphabet:
    if spec == "dna":
        return DNA
    if spec == "protein":
        return PROTEIN
    try:
        return Alphabet.load(spec)
    except OSError as exc:
        raise UsageError(f"cannot read alphabet file {spec}: {exc}") from exc


def _read_text(path: str) -> str:
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def _write_text(path: str, text: str) -> None:
    with open(path, "w") as fh:
        fh.write(text)


def _load_circuit(path: str) -> ConstraintSystem:
    try:
        return ConstraintSystem.from_json(_read_text(path))
    except (CircuitError, json.JSONDecodeError) as exc:
        raise UsageError(f"malformed circuit file {path}: {exc}") from exc


def _print_stats(st, as_json: bool) -> None:
    if as_json:
        print(json.dumps(asdict(st), sort_keys=True))
        return
    print(f"non-linear constraints: {st.nonlinear_constraints}")
    print(f"linear constraints:     {st.linear_constraints}")
    print(f"wires:                  {st.wires}")
    print(f"public inputs:          {st.public_inputs}")
    print(f"private inputs:         {st.private_inputs}")
    print(f"outputs:                {st.outputs}")


def cmd_compile(args) -> int:
    alphabet = _alphabet(args.alphabet)
    mask = VisibilityMask.hiding(args.nseq, args.private_seq or (), not args.private_score) if args.nseq >= 2 else None
    params = CircuitParams(args.nseq, args.seq_len, args.aln_len, alphabet, mask)
    cs = build_main(params)
    if args.out:
        _write_text(args.out, cs.to_json())
    _print_stats(stats(cs), args.json)
    return EXIT_OK


def parse_grid(spec: str) -> list[tuple[int, int, int]]:
    """``"nseq=2,4;seq_len=4;aln_len=6,11"`` to the list of grid points.

    An empty string is the empty grid.
    """
    if not spec.strip():
        return []
    axes: dict[str, list[int]] = {}
    for part in spec.split(";"):
        if "=" not in part:
            raise UsageError(f"grid axis {part!r} is not NAME=v1,v2,...")
        name, values = part.split("=", 1)
        name = name.strip().replace("-", "_")
        if name not in ("nseq", "seq_len", "aln_len"):
            raise UsageError(f"unknown grid axis {name!r}")
        try:
            axes[name] = [int(v) for v in values.split(",") if v.strip()]
        except ValueError as exc:
            raise UsageError(f"bad value in grid axis {name!r}") from exc
    missing = {"nseq", "seq_len", "aln_len"} - set(axes)
    if missing:
        raise UsageError(f"grid is missing axis {sorted(missing)[0]!r}")
    return list(product(axes["nseq"], axes["seq_len"], axes["aln_len"]))


def _sweep_point(point: tuple[int, int, int]) -> dict:
    st = stats(build_main(CircuitParams(*point)))
    n, s, a = point
    return {
        "nseq": n,
        "seq_len": s,
        "aln_len": a,
        "nonlinear": st.nonlinear_constraints,
        "linear": st.linear_constraints,
        "wires": st.wires,
    }


def cmd_stats_sweep(args) -> int:
    points = parse_grid(args.grid)
    for p in points:
        CircuitParams(*p)
    if args.jobs > 1 and len(points) > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            rows = list(pool.map(_sweep_point, points))
    else:
        rows = [_sweep_point(p) for p in points]
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        writer = csv.DictWriter(out, fieldnames=SWEEP_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)
    finally:
        if args.out:
            out.close()
    return EXIT_OK


def cmd_check(args) -> int:
    inst = load_instance(args.instance)
    try:
        reasons = oracle.explain(inst)
    except oracle.MalformedInstance as exc:
        raise UsageError(str(exc)) from exc
    alphabet = _alphabet(args.alphabet)
    for row in inst.seqs + inst.aln:
        for ch in row:
            if ch not in alphabet:
                raise UsageError(f"character {ch!r} is not in the alphabet")
    if args.nseq is not None:
        # raises EncodingError if the instance does not fit these dimensions
        encode_instance(CircuitParams(args.nseq, args.seq_len, args.aln_len, alphabet), inst)
    if reasons:
        for r in reasons:
            print(f"invalid: {r}")
        return EXIT_INVALID
    print("valid")
    return EXIT_OK


def cmd_witness(args) -> int:
    cs = _load_circuit(args.circuit)
    params = params_of(cs)
    inst = load_instance(args.instance)
    inputs = encode_instance(params, inst)
    w = synthesize_witness(cs, inputs)
    if args.out:
        _write_text(args.out, w.to_json())
    y = w[cs.labels["y"]]
    score = decode_signed(w[cs.labels["msa_score"]], params.score_bound)
    print(f"y = {y}")
    print(f"alignment score = {score}")
    return EXIT_OK


def _entropy(text: str) -> bytes:
    try:
        return bytes.fromhex(text)
    except ValueError:
        return text.encode()


def _same_backend(args, name: str) -> None:
    if args.backend is not None and args.backend != name:
        raise UsageError(f"key was made by backend {name!r}, not {args.backend!r}")


def cmd_setup(args) -> int:
    cs = _load_circuit(args.circuit)
    pk, vk = zk_backend.get_backend(args.backend).setup(cs, _entropy(args.entropy))
    _write_text(args.pk, pk.to_json())
    _write_text(args.vk, vk.to_json())
    print(f"fingerprint {pk.fingerprint}")
    return EXIT_OK


def cmd_prove(args) -> int:
    cs = _load_circuit(args.circuit)
    pk = zk_backend.ProvingKey.from_json(_read_text(args.pk))
    _same_backend(args, pk.backend)
    try:
        w = Witness.from_json(_read_text(args.witness))
    except CircuitError as exc:
        raise UsageError(str(exc)) from exc
    proof = zk_backend.get_backend(pk.backend).prove(pk, cs, w)
    _write_text(args.out, proof.to_json())
    print(f"public output y = {proof.public_values[-1]}")
    return EXIT_OK


def cmd_verify(args) -> int:
    vk = zk_backend.VerifyingKey.from_json(_read_text(args.vk))
    proof = zk_backend.Proof.from_json(_read_text(args.proof))
    _same_backend(args, vk.backend)
    if args.public:
        try:
            values = [int(v) for v in json.loads(_read_text(args.public))]
        except (ValueError, TypeError) as exc:
            raise UsageError(f"malformed public values: {exc}") from exc
    else:
        values = list(proof.public_values)
    if proof.fingerprint != vk.fingerprint:
        raise UsageError("proof and verifying key belong to different circuits")
    ok = zk_backend.get_backend(vk.backend).verify(vk, values, proof)
    print("accepted" if ok else "rejected")
    if ok:
        print(f"public output y = {values[-1]}")
    return EXIT_OK if ok else EXIT_INVALID


def cmd_encode(args) -> int:
    alphabet = _alphabet(args.alphabet)
    try:
        seqs = read_fasta(args.fasta)
        alns = read_fasta(args.fasta_aln)
    except OSError as exc:
        raise UsageError(str(exc)) from exc
    inst = instance_from_fasta(seqs, alns, args.score, alphabet)
    text = instance_to_json(inst)
    if args.out:
        _write_text(args.out, text + "\n")
    else:
        print(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="zkmsa", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compile", help="build a validator circuit and report its size")
    p.add_argument("--nseq", type=int, required=True)
    p.add_argument("--seq-len", type=int, required=True)
    p.add_argument("--aln-len", type=int, required=True)
    p.add_argument("--alphabet", default="dna", help="dna, protein, or a file")
    p.add_argument("--private-seq", type=int, action="append", metavar="K",
                   help="make sequence K a private input (repeatable)")
    p.add_argument("--private-score", action="store_true")
    p.add_argument("--out", help="write the constraint system JSON here")
    p.add_argument("--json", action="store_true", help="print stats as JSON")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("stats-sweep", help="constraint counts over a parameter grid (CSV)")
    p.add_argument("--grid", required=True, help='e.g. "nseq=10;seq_len=10;aln_len=10,100"')
    p.add_argument("--out", help="CSV path (default stdout)")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_stats_sweep)

    p = sub.add_parser("check", help="validate an instance with the reference oracle")
    p.add_argument("instance")
    p.add_argument("--alphabet", default="dna")
    p.add_argument("--nseq", type=int)
    p.add_argument("--seq-len", type=int)
    p.add_argument("--aln-len", type=int)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("witness", help="generate a witness for an instance")
    p.add_argument("--circuit", required=True)
    p.add_argument("--instance", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("setup", help="generate proving and verifying keys")
    p.add_argument("--circuit", required=True)
    p.add_argument("--pk", required=True)
    p.add_argument("--vk", required=True)
    p.add_argument("--entropy", required=True, help="hex bytes or a passphrase")
    p.add_argument("--backend", default="dev", choices=["dev", "external"])
    p.set_defaults(func=cmd_setup)

    p = sub.add_parser("prove", help="prove a witness against a proving key")
    p.add_argument("--circuit", required=True)
    p.add_argument("--pk", required=True)
    p.add_argument("--witness", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--backend", choices=["dev", "external"], help="must match the key's backend")
    p.set_defaults(func=cmd_prove)

    p = sub.add_parser("verify", help="verify a proof envelope")
    p.add_argument("--vk", required=True)
    p.add_argument("--proof", required=True)
    p.add_argument("--public", help="JSON list of public values (default: those in the envelope)")
    p.add_argument("--backend", choices=["dev", "external"], help="must match the key's backend")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("encode", help="turn FASTA files into an instance file")
    p.add_argument("--fasta", required=True)
    p.add_argument("--fasta-aln", required=True)
    p.add_argument("--score", type=int, required=True)
    p.add_argument("--alphabet", default="dna")
    p.add_argument("--out")
    p.set_defaults(func=cmd_encode)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "command", None) == "check" and args.nseq is not None:
        if args.seq_len is None or args.aln_len is None:
            parser.error("--nseq needs --seq-len and --aln-len")
    try:
        return args.func(args)
    except (UsageError, EncodingError, CircuitError, zk_backend.BackendError, oracle.MalformedInstance) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
