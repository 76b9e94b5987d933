"""The alignment validator circuit.

``build_main`` wires two checks into one output ``y``:

* the claimed sum-of-pairs score equals the score of the hidden alignment
  (one 9-constraint scoring cell per column per row pair);
* every alignment row, with gaps removed, spells its input sequence. This
  is decided by routing a boolean enable token through a grid of T1 cells
  (one per sequence position and alignment column) over a final row of T2
  cells. A T1 cell sends the token south when the sequence is exhausted
  (``r == 0``), south-east when the letters agree, and east when the
  alignment holds a gap. T2 cells pass the token east over gaps only.

Grid wiring beyond the two cell templates:

* a cell's enable is the OR of its incoming west/north/north-west edges;
* a virtual column after the last alignment column lets the token descend
  only through padding (``r == 0``) rows;
* the sequence is accepted when the token reaches the virtual corner
  ``(seq_len, aln_len)``.

With these choices the non-linear constraint count is exactly
:func:`expected_nonlinear_constraints`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from math import comb

from zkmsa.field import encode_signed
from zkmsa.gadgets import const, g_and, g_is_equal, g_not, g_or
from zkmsa.r1cs import (
    PRIVATE_INPUT,
    PUBLIC_INPUT,
    ConstraintSystem,
    ConstraintSystemBuilder,
    LinearCombination,
    as_lc,
)

GAP = "-"

_ZERO = LinearCombination()
_ONE = LinearCombination.constant(1)


class EncodingError(ValueError):
    pass


@dataclass(frozen=True)
class Alphabet:
    letter_codes: dict[str, int]

    def __post_init__(self):
        codes = self.letter_codes
        if GAP in codes:
            raise EncodingError("'-' is reserved for the gap")
        for ch, code in codes.items():
            if not isinstance(ch, str) or len(ch) != 1:
                raise EncodingError(f"letter {ch!r} is not a single character")
            if isinstance(code, bool) or not isinstance(code, int) or not 0 < code < 256:
                raise EncodingError(f"code for {ch!r} must be in 1..255, got {code!r}")
        if len(set(codes.values())) != len(codes):
            raise EncodingError("letter codes must be distinct")

    @classmethod
    def from_letters(cls, letters: str) -> Alphabet:
        return cls({ch: i + 1 for i, ch in enumerate(letters)})

    @classmethod
    def load(cls, path: str) -> Alphabet:
        """Read a JSON ``{"A": 1, ...}`` map or a plain line of letters."""
        with open(path) as fh:
            text = fh.read().strip()
        if text.startswith("{"):
            return cls({str(k): v for k, v in json.loads(text).items()})
        return cls.from_letters("".join(text.split()))

    def code(self, ch: str) -> int:
        if ch == GAP:
            return 0
        try:
            return self.letter_codes[ch]
        except KeyError:
            raise EncodingError(f"character {ch!r} is not in the alphabet") from None

    def __contains__(self, ch: str) -> bool:
        return ch == GAP or ch in self.letter_codes

    def __hash__(self) -> int:
        return hash(tuple(sorted(self.letter_codes.items())))

    def to_json_dict(self) -> dict[str, int]:
        return dict(self.letter_codes)


DNA = Alphabet.from_letters("ACGT")
PROTEIN = Alphabet.from_letters("ACDEFGHIKLMNPQRSTVWY")


@dataclass(frozen=True)
class VisibilityMask:
    seq_public: tuple[bool, ...]
    score_public: bool = True

    @classmethod
    def default(cls, nseq: int) -> VisibilityMask:
        return cls((True,) * nseq, True)

    @classmethod
    def hiding(cls, nseq: int, private_seqs=(), score_public: bool = True) -> VisibilityMask:
        hidden = set(private_seqs)
        bad = [k for k in hidden if not 0 <= k < nseq]
        if bad:
            raise EncodingError(f"sequence index {bad[0]} out of range for {nseq} sequences")
        return cls(tuple(k not in hidden for k in range(nseq)), score_public)


@dataclass(frozen=True)
class CircuitParams:
    nseq: int
    seq_len: int
    aln_len: int
    alphabet: Alphabet = DNA
    visibility: VisibilityMask | None = None

    def __post_init__(self):
        for name in ("nseq", "seq_len", "aln_len"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int):
                raise EncodingError(f"{name} must be an integer")
        if self.nseq < 2:
            raise EncodingError("nseq must be at least 2")
        if self.seq_len < 1 or self.aln_len < 1:
            raise EncodingError("seq_len and aln_len must be at least 1")
        if self.visibility is None:
            object.__setattr__(self, "visibility", VisibilityMask.default(self.nseq))
        elif len(self.visibility.seq_public) != self.nseq:
            raise EncodingError("visibility mask length differs from nseq")

    @property
    def score_bound(self) -> int:
        return comb(self.nseq, 2) * self.aln_len

    def to_json_dict(self) -> dict:
        return {
            "nseq": self.nseq,
            "seq_len": self.seq_len,
            "aln_len": self.aln_len,
            "alphabet": self.alphabet.to_json_dict(),
            "seq_public": list(self.visibility.seq_public),
            "score_public": self.visibility.score_public,
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> CircuitParams:
        return cls(
            nseq=doc["nseq"],
            seq_len=doc["seq_len"],
            aln_len=doc["aln_len"],
            alphabet=Alphabet(dict(doc["alphabet"])),
            visibility=VisibilityMask(tuple(doc["seq_public"]), doc["score_public"]),
        )


@dataclass
class MsaInstance:
    seqs: list[str]
    aln: list[str]
    score: int


def expected_nonlinear_constraints(nseq: int, seq_len: int, aln_len: int) -> int:
    """Closed-form non-linear constraint count of ``build_main``.

    Per sequence grid: 13 per T1 cell, 5 per T2 cell, 2 ORs for every cell
    off the top row and first column, 3 per virtual-column cell plus 2 ORs
    below its top, 2 ORs at the corner, minus the 2 constant-folded
    constraints of the top-left cell (its enable is the constant 1). Then
    nseq-1 ANDs across sequences, 9 per scoring cell, 2 for the score
    comparison and 1 for the final AND.
    """
    n, s, a = nseq, seq_len, aln_len
    return 9 * comb(n, 2) * a + 15 * n * s * a + 5 * n * a + 3 * n * s - n + 2


def expected_linear_constraints(nseq: int, seq_len: int, aln_len: int) -> int:
    return 2 * nseq


def build_scoring_system(builder: ConstraintSystemBuilder, x0, x1) -> int:
    xeq = g_is_equal(builder, x0, x1)
    xneq = g_not(builder, xeq)
    gap = g_or(builder, g_is_equal(builder, x0, _ZERO), g_is_equal(builder, x1, _ZERO))
    bgap = g_and(builder, xeq, gap)
    ngap = g_not(builder, gap)
    eq_ngap = g_and(builder, xeq, ngap)
    return builder.define_linear(as_lc(eq_ngap) - xneq - bgap)


def build_pair_score(builder: ConstraintSystemBuilder, row_i, row_j) -> int:
    if len(row_i) != len(row_j) or not row_i:
        raise EncodingError("alignment rows must be non-empty and of equal length")
    running = None
    for x0, x1 in zip(row_i, row_j):
        y = build_scoring_system(builder, x0, x1)
        running = y if running is None else builder.define_linear(as_lc(running) + y)
    return running


def build_msa_score(builder: ConstraintSystemBuilder, aln) -> int:
    if len(aln) < 2:
        raise EncodingError("need at least two alignment rows")
    pair_scores = [
        build_pair_score(builder, aln[i], aln[j])
        for i in range(len(aln))
        for j in range(i + 1, len(aln))
    ]
    if len(pair_scores) == 1:
        return pair_scores[0]
    total = LinearCombination()
    for p in pair_scores:
        total = total + p
    return builder.define_linear(total)


def build_check_aln_score(builder: ConstraintSystemBuilder, aln, score) -> int:
    msa = build_msa_score(builder, aln)
    builder.label("msa_score", msa)
    return g_is_equal(builder, msa, score)


def build_t1(builder: ConstraintSystemBuilder, e, r, c) -> tuple[int, int, int]:
    e1 = g_is_equal(builder, e, _ONE)
    rc = g_is_equal(builder, c, r)
    c0 = g_is_equal(builder, c, _ZERO)
    r0 = g_is_equal(builder, r, _ZERO)
    nr0 = g_not(builder, r0)
    t1 = g_and(builder, rc, nr0)
    t2 = g_and(builder, c0, nr0)
    es = g_and(builder, e1, r0)
    ese = g_and(builder, e1, t1)
    ee = g_and(builder, e1, t2)
    return es, ese, ee


def build_t2(builder: ConstraintSystemBuilder, e, c) -> int:
    e1 = g_is_equal(builder, e, _ONE)
    c0 = g_is_equal(builder, c, _ZERO)
    return g_and(builder, e1, c0)


def _merge(builder: ConstraintSystemBuilder, edges: list[int]) -> int:
    out = edges[0]
    for edge in edges[1:]:
        out = g_or(builder, out, edge)
    return out


def build_sequence_grid(builder: ConstraintSystemBuilder, seq_row, aln_row, trace: list | None = None) -> int:
    """Acceptance bit for one sequence against one alignment row."""
    s, a = len(seq_row), len(aln_row)
    es = [[None] * a for _ in range(s)]
    ese = [[None] * a for _ in range(s)]
    ee = [[None] * a for _ in range(s + 1)]
    start = const(builder, 1)
    for i in range(s + 1):
        for j in range(a):
            if i == 0 and j == 0:
                e = start
            else:
                edges = []
                if j >= 1:
                    edges.append(ee[i][j - 1])
                if i >= 1:
                    edges.append(es[i - 1][j])
                    if j >= 1:
                        edges.append(ese[i - 1][j - 1])
                e = _merge(builder, edges)
            if i < s:
                es[i][j], ese[i][j], ee[i][j] = build_t1(builder, e, seq_row[i], aln_row[j])
                if trace is not None:
                    trace.append(("T1", i, j, e, (es[i][j], ese[i][j], ee[i][j])))
            else:
                ee[i][j] = build_t2(builder, e, aln_row[j])
                if trace is not None:
                    trace.append(("T2", i, j, e, (ee[i][j],)))

    south = None
    for i in range(s):
        edges = [ee[i][a - 1]]
        if i >= 1:
            edges += [ese[i - 1][a - 1], south]
        e = _merge(builder, edges)
        south = g_and(builder, e, g_is_equal(builder, seq_row[i], _ZERO))
        if trace is not None:
            trace.append(("V", i, a, e, (south,)))
    accept = _merge(builder, [ese[s - 1][a - 1], ee[s][a - 1], south])
    if trace is not None:
        trace.append(("ACCEPT", s, a, accept, ()))
    return accept


def build_check_aln_seq(builder: ConstraintSystemBuilder, seq, aln, trace: dict | None = None) -> int:
    if len(seq) != len(aln) or len(seq) < 1:
        raise EncodingError("sequence and alignment row counts differ")
    bits = []
    for k in range(len(seq)):
        cells = None if trace is None else trace.setdefault(k, [])
        bits.append(build_sequence_grid(builder, seq[k], aln[k], cells))
    out = bits[0]
    for bit in bits[1:]:
        out = g_and(builder, out, bit)
    return out


def build_main(params: CircuitParams, trace: dict | None = None) -> ConstraintSystem:
    if not isinstance(params, CircuitParams):
        raise EncodingError("build_main expects CircuitParams")
    b = ConstraintSystemBuilder()
    mask = params.visibility
    seq = []
    for k in range(params.nseq):
        vis = PUBLIC_INPUT if mask.seq_public[k] else PRIVATE_INPUT
        seq.append([b.alloc_signal(vis, f"seq[{k}][{i}]") for i in range(params.seq_len)])
    aln = [
        [b.alloc_signal(PRIVATE_INPUT, f"aln[{k}][{j}]") for j in range(params.aln_len)]
        for k in range(params.nseq)
    ]
    score = b.alloc_signal(PUBLIC_INPUT if mask.score_public else PRIVATE_INPUT, "score")

    aln_seq = build_check_aln_seq(b, seq, aln, trace)
    aln_score = build_check_aln_score(b, aln, score)
    y = g_and(b, aln_score, aln_seq)
    b.label("aln_seq", aln_seq)
    b.label("aln_score", aln_score)
    b.label("y", y)
    b.mark_output(y)
    cs = b.finalize()
    cs.meta = {"params": params.to_json_dict()}
    return cs


def params_of(cs: ConstraintSystem) -> CircuitParams:
    try:
        return CircuitParams.from_json_dict(cs.meta["params"])
    except (AttributeError, KeyError, TypeError) as exc:
        raise EncodingError("circuit carries no validator parameters") from exc


def encode_instance(params: CircuitParams, inst: MsaInstance) -> dict[str, int]:
    if len(inst.seqs) != params.nseq or len(inst.aln) != params.nseq:
        raise EncodingError(f"expected {params.nseq} sequences and alignment rows")
    alphabet = params.alphabet
    out: dict[str, int] = {}
    for k, s in enumerate(inst.seqs):
        if len(s) > params.seq_len:
            raise EncodingError(f"sequence {k} is longer than seq_len={params.seq_len}")
        if GAP in s:
            raise EncodingError(f"sequence {k} contains a gap character")
        codes = [alphabet.code(ch) for ch in s] + [0] * (params.seq_len - len(s))
        for i, v in enumerate(codes):
            out[f"seq[{k}][{i}]"] = v
    for k, row in enumerate(inst.aln):
        if len(row) != params.aln_len:
            raise EncodingError(f"alignment row {k} has length {len(row)}, expected {params.aln_len}")
        for j, ch in enumerate(row):
            out[f"aln[{k}][{j}]"] = alphabet.code(ch)
    if isinstance(inst.score, bool) or not isinstance(inst.score, int):
        raise EncodingError("score must be an integer")
    if abs(inst.score) > params.score_bound:
        raise EncodingError(f"score {inst.score} exceeds the achievable magnitude {params.score_bound}")
    out["score"] = int(encode_signed(inst.score))
    return out
