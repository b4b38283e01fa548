"""Line-oriented ``.crn`` text format.

::

    # Example: reversible isomerisation
    species Z1 Z2
    Z1 <=> Z2 ; k=1,2
    inputs Y1 Y2            # declaring inputs/outputs yields an MsCrc
    Y1 + Z1 -> Y1 + Z2 ; k=1
    2 X -> 0 ; k=0.5        # 0 is the empty complex

Species get ids in declaration order, then in order of first use when
``auto_declare`` is on.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

from .core import MAX_COEFFICIENT, Complex, Constant, Crn, MsCrc, Reaction, Species

KEYWORDS = ("species", "inputs", "outputs")

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r\f\v]+)
  | (?P<arrow><=>|->)
  | (?P<rate>k=)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>[+;,])
    """,
    re.VERBOSE,
)


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.message = message
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}" if line else message)


@dataclass
class _Tok:
    kind: str
    text: str
    col: int


def _tokenize(text: str, lineno: int) -> list[_Tok]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", lineno, pos + 1)
        if m.lastgroup != "ws":
            out.append(_Tok(m.lastgroup, m.group(), pos + 1))
        pos = m.end()
    return out


class _Line:
    def __init__(self, toks: list[_Tok], lineno: int, width: int):
        self.toks = toks
        self.i = 0
        self.lineno = lineno
        self.width = width

    def peek(self) -> _Tok | None:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def error(self, msg: str, tok: _Tok | None = None) -> ParseError:
        tok = tok or self.peek()
        return ParseError(msg, self.lineno, tok.col if tok else self.width + 1)

    def take(self, kind: str, what: str) -> _Tok:
        tok = self.peek()
        if tok is None or tok.kind != kind:
            found = "end of line" if tok is None else repr(tok.text)
            raise self.error(f"expected {what}, found {found}")
        self.i += 1
        return tok

    def at(self, kind: str, text: str | None = None) -> bool:
        tok = self.peek()
        return tok is not None and tok.kind == kind and (text is None or tok.text == text)


def _parse_rate(line: _Line) -> float:
    tok = line.take("num", "a rate constant")
    value = float(tok.text)
    if not (value > 0 and value != float("inf")):
        raise line.error(f"rate must be positive and finite, got {tok.text}", tok)
    return value


def _parse_complex(line: _Line) -> list[tuple[str, int, _Tok]]:
    if line.at("num") and line.peek().text == "0":
        nxt = line.toks[line.i + 1] if line.i + 1 < len(line.toks) else None
        if nxt is None or nxt.kind != "ident":
            line.i += 1
            return []
    terms = []
    while True:
        coeff = 1
        if line.at("num"):
            tok = line.take("num", "a coefficient")
            if not tok.text.isdigit():
                raise line.error(f"coefficient must be an integer, got {tok.text}", tok)
            coeff = int(tok.text)
            if coeff < 1 or coeff > MAX_COEFFICIENT:
                raise line.error(f"coefficient out of range: {tok.text}", tok)
        name = line.take("ident", "a species name")
        terms.append((name.text, coeff, name))
        if not line.at("punct", "+"):
            return terms
        line.i += 1


def parse_network(text: Union[str, bytes], auto_declare: bool = True) -> Union[Crn, MsCrc]:
    """Parse ``.crn`` text into a :class:`Crn` or, if inputs/outputs are
    declared, an :class:`MsCrc`.

    Raises:
        ParseError: on any malformed or inconsistent input, with the
            line and column of the offending token.
    """
    if isinstance(text, (bytes, bytearray)):
        try:
            text = bytes(text).decode("utf-8")
        except UnicodeDecodeError as exc:
            line = bytes(text)[: exc.start].count(b"\n") + 1
            raise ParseError(f"input is not valid UTF-8: {exc.reason}", line, 1) from None
    names: list[str] = []
    index: dict[str, int] = {}
    inputs: list[str] | None = None
    outputs: list[str] | None = None
    raw: list[tuple[list, list, float, int]] = []

    def declare(name: str, tok: _Tok, lineno: int, explicit: bool):
        if name in index:
            if explicit:
                raise ParseError(f"species {name!r} declared twice", lineno, tok.col)
            return
        if not explicit and not auto_declare:
            raise ParseError(f"unknown species {name!r}", lineno, tok.col)
        index[name] = len(names)
        names.append(name)

    for lineno, rawline in enumerate(text.splitlines(), start=1):
        body = rawline.split("#", 1)[0]
        toks = _tokenize(body, lineno)
        if not toks:
            continue
        line = _Line(toks, lineno, len(body))
        head = toks[0]
        if head.kind == "ident" and head.text in KEYWORDS and not any(t.kind == "arrow" for t in toks):
            line.i = 1
            idents = []
            while line.peek() is not None:
                idents.append(line.take("ident", "a species name"))
            if not idents:
                raise line.error(f"'{head.text}' needs at least one species name")
            if head.text == "species":
                for t in idents:
                    declare(t.text, t, lineno, explicit=True)
            else:
                for t in idents:
                    declare(t.text, t, lineno, explicit=False)
                group = [t.text for t in idents]
                if head.text == "inputs":
                    if inputs is not None:
                        raise ParseError("inputs declared twice", lineno, head.col)
                    inputs = group
                else:
                    if outputs is not None:
                        raise ParseError("outputs declared twice", lineno, head.col)
                    outputs = group
            continue

        left = _parse_complex(line)
        arrow = line.take("arrow", "'->' or '<=>'")
        right = _parse_complex(line)
        if not line.at("punct", ";"):
            tok = line.peek()
            raise line.error(f"expected ';', found {'end of line' if tok is None else repr(tok.text)}")
        line.i += 1
        line.take("rate", "'k='")
        rates = [_parse_rate(line)]
        while line.at("punct", ","):
            line.i += 1
            rates.append(_parse_rate(line))
        if line.peek() is not None:
            raise line.error(f"unexpected {line.peek().text!r} after rates")
        want = 2 if arrow.text == "<=>" else 1
        if len(rates) != want:
            raise ParseError(f"'{arrow.text}' needs exactly {want} rate(s), got {len(rates)}", lineno, arrow.col)
        for name, _, tok in left + right:
            declare(name, tok, lineno, explicit=False)
        lc = {}
        for name, c, _ in left:
            lc[name] = lc.get(name, 0) + c
        rc = {}
        for name, c, _ in right:
            rc[name] = rc.get(name, 0) + c
        if lc == rc:
            raise ParseError("reactant and product complexes coincide", lineno, arrow.col)
        raw.append((lc, rc, rates[0], lineno))
        if want == 2:
            raw.append((rc, lc, rates[1], lineno))

    try:
        reactions = []
        for lc, rc, k, lineno in raw:
            try:
                reactions.append(
                    Reaction(
                        Complex.of((index[s], c) for s, c in lc.items()),
                        Complex.of((index[s], c) for s, c in rc.items()),
                        Constant(k),
                    )
                )
            except ValueError as exc:
                raise ParseError(str(exc), lineno, 1) from None
        crn = Crn(tuple(Species(i, s) for i, s in enumerate(names)), tuple(reactions))
    except ParseError:
        raise
    except ValueError as exc:
        raise ParseError(str(exc)) from None

    if inputs is None and outputs is None:
        return crn
    all_names = set(names)
    if inputs is not None and outputs is not None:
        overlap = set(inputs) & set(outputs)
        if overlap:
            raise ParseError(f"species both input and output: {sorted(overlap)}")
        missing = all_names - set(inputs) - set(outputs)
        if missing:
            raise ParseError(f"species neither input nor output: {sorted(missing)}")
    elif inputs is None:
        inputs = [s for s in names if s not in set(outputs)]
    try:
        return MsCrc.from_names(crn, inputs)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def _format_rate(k: float) -> str:
    text = repr(float(k))
    return text[:-2] if text.endswith(".0") else text


def format_reaction(rxn: Reaction, names) -> str:
    return f"{rxn.reactant.format(names)} -> {rxn.product.format(names)} ; k={_format_rate(rxn.rate.k)}"


def format_network(net: Union[Crn, MsCrc], comments: dict[int, str] | None = None) -> str:
    """Canonical ``.crn`` text.

    Adjacent forward/backward pairs are folded into ``<=>`` so that parsing
    the output gives back the same reaction list. ``comments`` attaches a
    trailing comment to the line of the given reaction index.
    """
    crn = net.crn if isinstance(net, MsCrc) else net
    names = crn.names
    lines = []
    if names:
        lines.append("species " + " ".join(names))
    if isinstance(net, MsCrc):
        lines.append("inputs " + " ".join(net.input_names))
        lines.append("outputs " + " ".join(net.output_names))
    comments = comments or {}
    rxns = crn.reactions
    j = 0
    while j < len(rxns):
        r = rxns[j]
        nxt = rxns[j + 1] if j + 1 < len(rxns) else None
        if nxt is not None and nxt.reactant == r.product and nxt.product == r.reactant and j not in comments:
            lines.append(
                f"{r.reactant.format(names)} <=> {r.product.format(names)} ; "
                f"k={_format_rate(r.rate.k)},{_format_rate(nxt.rate.k)}"
                + (f"  # {comments[j + 1]}" if j + 1 in comments else "")
            )
            j += 2
            continue
        text = format_reaction(r, names)
        if j in comments:
            text += f"  # {comments[j]}"
        lines.append(text)
        j += 1
    return "\n".join(lines) + "\n"


def load_network(path, auto_declare: bool = True) -> Union[Crn, MsCrc]:
    with open(path, "rb") as fh:
        return parse_network(fh.read(), auto_declare=auto_declare)
