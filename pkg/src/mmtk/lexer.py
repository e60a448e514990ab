"""Tokenizer for the Twelf-flavored document syntax.

Rules of the road:
  - brackets ``()[]{}`` always split;
  - a word containing ``://`` is one URI token, kept verbatim (so a
    declaration-terminating ``.`` after a URI needs surrounding whitespace);
  - ``:``, ``=``, ``.``, ``#`` and ``->`` split out of mixed words, but a word
    made purely of punctuation (an operator name like ``==`` or ``*``) stays
    whole;
  - ``#`` at the start of a line comments out the rest of the line; elsewhere
    it introduces a notation clause.
"""

from __future__ import annotations

from dataclasses import dataclass

BRACKETS = "()[]{}"
SPLIT_SINGLE = ":=.#"

WORD = "word"
PUNCT = "punct"
URI = "uri"

_PUNCT_TEXTS = {"(", ")", "[", "]", "{", "}", ":", "=", ".", "#", "->"}


@dataclass(frozen=True)
class Token:
    text: str
    kind: str
    line: int
    col: int  # 1-based

    @property
    def end_col(self) -> int:
        return self.col + len(self.text)


def _split_word(word: str) -> list[str]:
    if "://" in word:
        return [word]
    if not any(c.isalnum() for c in word):
        return [word]
    pieces: list[str] = []
    buf = ""
    i = 0
    while i < len(word):
        if word.startswith("->", i):
            if buf:
                pieces.append(buf)
                buf = ""
            pieces.append("->")
            i += 2
        elif word[i] in SPLIT_SINGLE:
            if buf:
                pieces.append(buf)
                buf = ""
            pieces.append(word[i])
            i += 1
        else:
            buf += word[i]
            i += 1
    if buf:
        pieces.append(buf)
    return pieces


def tokenize(source: str, file: str = "<string>") -> list[Token]:
    tokens: list[Token] = []
    for line_no, line in enumerate(source.splitlines(), start=1):
        stripped = line.lstrip()
        if stripped.startswith("#"):
            continue  # whole-line comment
        col = 0
        n = len(line)
        while col < n:
            ch = line[col]
            if ch.isspace():
                col += 1
                continue
            if ch in BRACKETS:
                tokens.append(Token(ch, PUNCT, line_no, col + 1))
                col += 1
                continue
            start = col
            while col < n and not line[col].isspace() and line[col] not in BRACKETS:
                col += 1
            word = line[start:col]
            offset = 0
            for piece in _split_word(word):
                at = word.index(piece, offset)
                kind = URI if "://" in piece else (PUNCT if piece in _PUNCT_TEXTS else WORD)
                tokens.append(Token(piece, kind, line_no, start + at + 1))
                offset = at + len(piece)
    return tokens
