"""Instance files and FASTA ingestion."""

from __future__ import annotations

import json

from zkmsa.msa_circuit import GAP, Alphabet, EncodingError, MsaInstance


def parse_fasta(text: str) -> list[tuple[str, str]]:
    """``[(name, letters), ...]`` in file order; letters are upper-cased."""
    records: list[tuple[str, list[str]]] = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith(";"):
            continue
        if line.startswith(">"):
            records.append((line[1:].strip(), []))
        elif not records:
            raise EncodingError(f"line {lineno}: sequence data before the first '>' header")
        else:
            records[-1][1].append("".join(line.split()).upper())
    return [(name, "".join(parts)) for name, parts in records]


def read_fasta(path: str) -> list[tuple[str, str]]:
    with open(path) as fh:
        return parse_fasta(fh.read())


def instance_from_fasta(seq_records, aln_records, score: int, alphabet: Alphabet) -> MsaInstance:
    if len(seq_records) != len(aln_records):
        raise EncodingError(f"{len(seq_records)} sequences but {len(aln_records)} alignment records")
    seqs = [s for _, s in seq_records]
    aln = [a for _, a in aln_records]
    for k, s in enumerate(seqs):
        if GAP in s:
            raise EncodingError(f"sequence record {k} contains a gap character")
    for rows, what in ((seqs, "sequence"), (aln, "alignment")):
        for k, row in enumerate(rows):
            for ch in row:
                if ch not in alphabet:
                    raise EncodingError(f"{what} record {k}: character {ch!r} is not in the alphabet")
    return MsaInstance(seqs, aln, score)


def instance_to_json(inst: MsaInstance) -> str:
    return json.dumps({"seq": inst.seqs, "aln": inst.aln, "score": inst.score}, indent=2)


def load_instance(path: str) -> MsaInstance:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise EncodingError(f"cannot read instance {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise EncodingError("instance must be a JSON object")
    seqs, aln, score = doc.get("seq"), doc.get("aln"), doc.get("score")
    if not isinstance(seqs, list) or not all(isinstance(s, str) for s in seqs):
        raise EncodingError("'seq' must be a list of strings")
    if not isinstance(aln, list) or not all(isinstance(s, str) for s in aln):
        raise EncodingError("'aln' must be a list of strings")
    if isinstance(score, bool) or not isinstance(score, int):
        raise EncodingError("'score' must be an integer")
    if len(seqs) != len(aln):
        raise EncodingError("'seq' and 'aln' have different lengths")
    return MsaInstance(seqs, aln, score)
