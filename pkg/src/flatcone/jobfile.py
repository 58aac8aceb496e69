"""Plain-text job files.

Grammar (statements end with ``;``, ``#`` starts a comment)::

    ring x y z ;
    params s t ;
    let F = (x^2 + y^2*z - s)*(x - t) ;
    ideal P = x, y ;
    vector rel = 0, y, -2*z ;
    check flatness --condition ii --degree-bound 4 ;

``ring`` must come first and appear once; ``params`` is optional.  ``ideal``
and ``vector`` bind comma-separated polynomial lists.  ``check`` lines hold
a default command line for ``flatcone run``.
"""

from __future__ import annotations

import re
import shlex
from dataclasses import dataclass, field

from .polycore import PolySyntaxError, RingContext, parse_poly

_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


class JobSyntaxError(ValueError):
    def __init__(self, message, line, column, path="<job>"):
        super().__init__(f"{path}:{line}:{column}: {message}")
        self.line = line
        self.column = column
        self.path = path
        self.message = message


@dataclass
class JobSpec:
    ctx: RingContext
    polys: dict = field(default_factory=dict)
    ideals: dict = field(default_factory=dict)
    vectors: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)

    def lookup(self, name):
        for table in (self.polys, self.ideals, self.vectors):
            if name in table:
                return table[name]
        raise KeyError(name)

    def to_text(self):
        lines = ["ring " + " ".join(self.ctx.fiber_vars) + " ;"]
        if self.ctx.param_vars:
            lines.append("params " + " ".join(self.ctx.param_vars) + " ;")
        for name, p in self.polys.items():
            lines.append(f"let {name} = {p} ;")
        for name, ps in self.ideals.items():
            lines.append(f"ideal {name} = " + ", ".join(str(p) for p in ps) + " ;")
        for name, ps in self.vectors.items():
            lines.append(f"vector {name} = " + ", ".join(str(p) for p in ps) + " ;")
        for argv in self.checks:
            lines.append("check " + " ".join(shlex.quote(a) for a in argv) + " ;")
        return "\n".join(lines) + "\n"


def _statements(text):
    """Yield ``(body, offset)`` for each ``;``-terminated statement."""
    # blank out comments so offsets still point into the original text
    src = re.sub(r"#[^\n]*", lambda m: " " * len(m.group()), text)
    start = 0
    for i, ch in enumerate(src):
        if ch == ";":
            yield src[start:i], start
            start = i + 1
    tail = src[start:]
    if tail.strip():
        yield None, start + (len(tail) - len(tail.lstrip()))


def _position(text, offset):
    line = text.count("\n", 0, offset) + 1
    col = offset - (text.rfind("\n", 0, offset) + 1) + 1
    return line, col


def _split_list(body, base):
    """Split a comma list, returning ``(piece, offset)`` pairs."""
    out = []
    depth = 0
    start = 0
    for i, ch in enumerate(body):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "," and depth == 0:
            out.append((body[start:i], base + start))
            start = i + 1
    out.append((body[start:], base + start))
    return out


def parse_job(text, path="<job>"):
    ctx = None
    job = None

    def fail(msg, offset):
        line, col = _position(text, offset)
        raise JobSyntaxError(msg, line, col, path)

    def poly(src, offset):
        try:
            return parse_poly(src, ctx)
        except PolySyntaxError as e:
            fail(e.message, offset + e.position)

    for body, offset in _statements(text):
        if body is None:
            fail("missing ';' at end of statement", offset)
        stripped = body.lstrip()
        if not stripped.strip():
            continue
        off = offset + (len(body) - len(stripped))
        m = re.match(r"(\S+)\s*", stripped)
        head, rest = m.group(1), stripped[m.end():]
        rest_off = off + m.end()
        if head in ("ring", "params"):
            names = rest.split()
            for n in names:
                if not _NAME.fullmatch(n):
                    fail(f"bad variable name {n!r}", rest_off + rest.find(n))
            if head == "ring":
                if ctx is not None:
                    fail("duplicate ring declaration", off)
                if not names:
                    fail("ring needs at least one variable", off)
                try:
                    ctx = RingContext(tuple(names))
                except ValueError as e:
                    fail(str(e), off)
                job = JobSpec(ctx)
            else:
                if ctx is None:
                    fail("params before ring", off)
                if ctx.param_vars or job.polys or job.ideals or job.vectors:
                    fail("params must directly follow ring", off)
                try:
                    ctx = RingContext(ctx.fiber_vars, tuple(names))
                except ValueError as e:
                    fail(str(e), off)
                job.ctx = ctx
            continue
        if ctx is None:
            fail("expected 'ring' declaration first", off)
        if head == "check":
            try:
                job.checks.append(shlex.split(rest))
            except ValueError as e:
                fail(str(e), rest_off)
            continue
        if head not in ("let", "ideal", "vector"):
            fail(f"unknown statement {head!r}", off)
        name, eq, value = rest.partition("=")
        name = name.strip()
        if not eq:
            fail("expected '='", rest_off + len(rest.rstrip()))
        if not _NAME.fullmatch(name):
            fail(f"bad name {name!r}", rest_off)
        if name in ctx.index:
            fail(f"name {name!r} clashes with a variable", rest_off)
        if any(name in t for t in (job.polys, job.ideals, job.vectors)):
            fail(f"duplicate binding {name!r}", rest_off)
        value_off = rest_off + len(rest) - len(value)
        if head == "let":
            job.polys[name] = poly(value, value_off)
        else:
            items = _split_list(value, value_off)
            ps = tuple(poly(src, o) for src, o in items)
            (job.ideals if head == "ideal" else job.vectors)[name] = ps
    if job is None:
        raise JobSyntaxError("empty job file: expected 'ring' declaration", 1, 1, path)
    return job


def load_job(path):
    with open(path, encoding="utf-8") as fh:
        return parse_job(fh.read(), str(path))
