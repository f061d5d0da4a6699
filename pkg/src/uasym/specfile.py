"""Plain-text input formats and tabular report emission.

Tuple files::

    tuple n=<n> dim=<d>
    # then, for each of the n matrices, d rows of d complex literals
    1+0i  0+0i
    0+0i  0-1i

Model files::

    shift n=<n> N=<N>

    toeplitz M=<M> G=<G>
    symbol
    arc <start> <end>
    arc <start> <end>
    symbol
    arc <start> <end>

Angles are radians; ``end < start`` wraps through 0.  ``#`` starts a
comment.  Parse failures carry 1-based line and column numbers.
"""

from __future__ import annotations

import csv
import io

import numpy as np

from .arcs import ArcSet
from .errors import ParseError
from .hardy import build_toeplitz_model
from .shifts import build_weighted_shift
from .tuples import validate_tuple

__all__ = ["parse_spec", "parse_complex", "format_report", "tuple_to_text"]


def parse_complex(token, line, col):
    """Complex literal: a, bi, a+bi, a-bi (also accepts j for i)."""
    try:
        return complex(token.replace("i", "j"))
    except ValueError:
        raise ParseError(line, col, f"malformed complex literal {token!r}") from None


def _logical_lines(text):
    """(line_number, tokens) for nonblank, noncomment lines."""
    for ln, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        if body.strip():
            yield ln, raw, body.split()


def _kv_int(tok, key, line, col):
    if not tok.startswith(key + "="):
        raise ParseError(line, col, f"expected {key}=<integer>, got {tok!r}")
    try:
        return int(tok[len(key) + 1 :])
    except ValueError:
        raise ParseError(line, col, f"malformed integer in {tok!r}") from None


def _col_of(raw, token, occurrence=0):
    pos = -1
    for _ in range(occurrence + 1):
        pos = raw.find(token, pos + 1)
    return pos + 1 if pos >= 0 else 1


def parse_spec(text, commute_tol=1e-10, **model_kwargs):
    """Parse a tuple or model spec; returns the validated object.

    Accepts the file content as a string; callers read the file and keep
    the path for error reporting.
    """
    lines = list(_logical_lines(text))
    if not lines:
        raise ParseError(1, 1, "empty spec")
    ln, raw, toks = lines[0]
    kind = toks[0]
    if kind == "tuple":
        if len(toks) != 3:
            raise ParseError(ln, 1, "header must be: tuple n=<n> dim=<d>")
        n = _kv_int(toks[1], "n", ln, _col_of(raw, toks[1]))
        d = _kv_int(toks[2], "dim", ln, _col_of(raw, toks[2]))
        if n < 1 or d < 1:
            raise ParseError(ln, 1, "n and dim must be positive")
        rows = lines[1:]
        if len(rows) != n * d:
            raise ParseError(ln, 1,
                             f"expected {n * d} matrix rows, found {len(rows)}")
        mats = []
        for i in range(n):
            mat = np.zeros((d, d), dtype=complex)
            for r in range(d):
                rln, rraw, rtoks = rows[i * d + r]
                if len(rtoks) != d:
                    raise ParseError(rln, 1,
                                     f"expected {d} entries, found {len(rtoks)}")
                for c, tok in enumerate(rtoks):
                    mat[r, c] = parse_complex(tok, rln, _col_of(rraw, tok, c and 0))
            mats.append(mat)
        return validate_tuple(mats, commute_tol)
    if kind == "shift":
        if len(toks) != 3:
            raise ParseError(ln, 1, "header must be: shift n=<n> N=<N>")
        n = _kv_int(toks[1], "n", ln, _col_of(raw, toks[1]))
        N = _kv_int(toks[2], "N", ln, _col_of(raw, toks[2]))
        if len(lines) > 1:
            raise ParseError(lines[1][0], 1, "shift spec takes no further lines")
        return build_weighted_shift(n, N)
    if kind == "toeplitz":
        if len(toks) != 3:
            raise ParseError(ln, 1, "header must be: toeplitz M=<M> G=<G>")
        M = _kv_int(toks[1], "M", ln, _col_of(raw, toks[1]))
        G = _kv_int(toks[2], "G", ln, _col_of(raw, toks[2]))
        symbols = []
        current = None
        for sln, sraw, stoks in lines[1:]:
            if stoks[0] == "symbol":
                if len(stoks) != 1:
                    raise ParseError(sln, 1, "symbol line takes no arguments")
                current = []
                symbols.append(current)
            elif stoks[0] == "arc":
                if len(stoks) != 3:
                    raise ParseError(sln, 1, "arc line must be: arc <start> <end>")
                try:
                    a, b = float(stoks[1]), float(stoks[2])
                except ValueError:
                    raise ParseError(sln, _col_of(sraw, stoks[1]),
                                     "malformed angle") from None
                if current is None:
                    current = []
                    symbols.append(current)
                current.append((a, b))
            else:
                raise ParseError(sln, 1, f"unknown directive {stoks[0]!r}")
        if not symbols or not all(symbols):
            raise ParseError(ln, 1, "each symbol needs at least one arc")
        arcsets = [ArcSet.from_arcs(s) for s in symbols]
        return build_toeplitz_model(arcsets, M=M, G=G, **model_kwargs)
    raise ParseError(ln, 1, f"unknown spec kind {kind!r} "
                            "(expected tuple, shift or toeplitz)")


def _fmt_complex(z):
    return f"{z.real:.12g}{z.imag:+.12g}i"


def tuple_to_text(t):
    """Serialize an operator tuple back into the spec format."""
    out = [f"tuple n={t.n} dim={t.dim}"]
    for m in t.mats:
        for row in m:
            out.append("  ".join(_fmt_complex(z) for z in row))
    return "\n".join(out) + "\n"


def format_report(header, rows, fmt="text"):
    """Render a report: header dict + list of (key, value) rows.

    text: aligned `key: value` lines under a commented header.
    csv: one header comment line, then key,value records.
    """
    if fmt not in ("text", "csv"):
        raise ValueError(f"unknown format {fmt!r}")
    head = " ".join(f"{k}={v}" for k, v in header.items())
    if fmt == "text":
        width = max((len(str(k)) for k, _ in rows), default=0)
        body = [f"{str(k).ljust(width)} : {v}" for k, v in rows]
        return "\n".join([f"# {head}"] + body) + "\n"
    buf = io.StringIO()
    buf.write(f"# {head}\n")
    writer = csv.writer(buf)
    writer.writerow(["key", "value"])
    for k, v in rows:
        writer.writerow([k, v])
    return buf.getvalue()
