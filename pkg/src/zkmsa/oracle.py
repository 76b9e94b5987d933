"""Plain-string reference validator.

Nothing here touches field elements or the constraint builder; these
functions are the ground truth the circuit is tested against.
"""

from __future__ import annotations

from itertools import combinations

GAP = "-"


class MalformedInstance(ValueError):
    """The instance cannot be judged at all (as opposed to being invalid)."""


def score_column(a: int, b: int) -> int:
    return 1 if a == b and a != 0 else -1


def score_pair(row_a: str, row_b: str) -> int:
    if len(row_a) != len(row_b):
        raise MalformedInstance(f"rows of length {len(row_a)} and {len(row_b)}")
    return sum(1 if x == y and x != GAP else -1 for x, y in zip(row_a, row_b))


def sp_score(aln: list[str]) -> int:
    if len(aln) < 2:
        raise MalformedInstance("need at least two alignment rows")
    if len({len(row) for row in aln}) != 1:
        raise MalformedInstance("alignment rows have different lengths")
    return sum(score_pair(a, b) for a, b in combinations(aln, 2))


def consistent(seq: str, aln_row: str) -> bool:
    return aln_row.replace(GAP, "") == seq


def grid_accepts(seq: str, aln_row: str, seq_len: int, aln_len: int) -> bool:
    """Run the enable-token automaton of the circuit grid on plain strings.

    Rows ``0..seq_len-1`` read sequence letters (``None`` past the end),
    row ``seq_len`` is the gap-only row, and column ``aln_len`` is the
    boundary column that may only be descended through padding.
    """
    if GAP in seq:
        raise MalformedInstance("sequence contains a gap character")
    if len(seq) > seq_len:
        raise MalformedInstance(f"sequence longer than seq_len={seq_len}")
    if len(aln_row) != aln_len:
        raise MalformedInstance(f"alignment row length {len(aln_row)} != aln_len={aln_len}")
    r = list(seq) + [None] * (seq_len - len(seq))
    c = [None if ch == GAP else ch for ch in aln_row]

    # en[i][j]: token entering cell (i, j); column aln_len is the boundary
    en = [[False] * (aln_len + 1) for _ in range(seq_len + 1)]
    en[0][0] = True
    for i in range(seq_len + 1):
        row, below = en[i], en[i + 1] if i < seq_len else None
        for j in range(aln_len):
            if not row[j]:
                continue
            if i == seq_len:
                if c[j] is None:
                    row[j + 1] = True
            elif r[i] is None:
                below[j] = True
            elif r[i] == c[j]:
                below[j + 1] = True
            elif c[j] is None:
                row[j + 1] = True
        if below is not None and row[aln_len] and r[i] is None:
            below[aln_len] = True
    return en[seq_len][aln_len]


def _check_shape(seqs: list[str], aln: list[str]) -> None:
    if len(seqs) != len(aln):
        raise MalformedInstance(f"{len(seqs)} sequences but {len(aln)} alignment rows")
    if len(aln) < 2:
        raise MalformedInstance("need at least two sequences")
    if len({len(row) for row in aln}) != 1:
        raise MalformedInstance("alignment rows have different lengths")
    for k, s in enumerate(seqs):
        if GAP in s:
            raise MalformedInstance(f"sequence {k} contains a gap character")


def explain(inst) -> list[str]:
    """Reasons ``inst`` is invalid; empty when it validates."""
    _check_shape(inst.seqs, inst.aln)
    reasons = []
    actual = sp_score(inst.aln)
    if actual != inst.score:
        reasons.append(f"score mismatch: claimed {inst.score}, alignment scores {actual}")
    for k, (s, row) in enumerate(zip(inst.seqs, inst.aln)):
        if not consistent(s, row):
            reasons.append(f"sequence {k} is inconsistent with alignment row {k}")
    return reasons


def validate(inst) -> bool:
    return not explain(inst)
