"""Scalar code emission shared by the engine's compiled rule evaluator and
the standalone code generator.

Every template here mirrors, operation for operation, the scalar formulas in
``mf`` and ``norms``; emitted code therefore reproduces the interpreter bit
for bit.  Changing a formula in either place requires changing it in both.

Emitted code references only the names ``exp``, ``log`` and ``abs``; callers
provide them (``math.exp``/``math.log``/builtin ``abs``, or a
``from math import exp, log`` line in standalone text).
"""

from __future__ import annotations

import keyword

from .errors import EvaluationError
from .mf import (Gaussian, GeneralizedBell, PiecewiseLinear, Sigmoid,
                 Singleton, Trapezoidal, Triangular)
from .model import And, Not, Or, Relation
from .norms import SNorm, TNorm


def lit(value: float) -> str:
    """Literal spelling of a float; parenthesized when signed so it can be
    embedded in any expression position."""
    r = repr(float(value))
    return f"({r})" if r.startswith("-") else r


class Writer:
    """Indentation-aware line collector."""

    def __init__(self):
        self.lines: list[str] = []
        self.level = 0
        self._counter = 0

    def emit(self, text: str = "") -> None:
        self.lines.append(("    " * self.level + text) if text else "")

    def sym(self, prefix: str = "_t") -> str:
        self._counter += 1
        return f"{prefix}{self._counter}"

    def text(self) -> str:
        return "\n".join(self.lines) + "\n"


def sanitize(name: str, taken: set[str], fallback: str = "v") -> str:
    """Turn an arbitrary string into a fresh valid Python identifier."""
    cleaned = "".join(c if c.isalnum() or c == "_" else "_" for c in name)
    cleaned = cleaned.lstrip("_")
    if not cleaned or cleaned[0].isdigit():
        cleaned = fallback + cleaned
    if keyword.iskeyword(cleaned):
        cleaned += "_"
    candidate = cleaned
    n = 2
    while candidate in taken:
        candidate = f"{cleaned}{n}"
        n += 1
    taken.add(candidate)
    return candidate


def emit_mf(w: Writer, mf, x: str, out: str) -> None:
    """Statements assigning ``out`` = mf(``x``), mirroring ``mf.__call__``."""
    if isinstance(mf, Triangular):
        a, b, c = lit(mf.a), lit(mf.b), lit(mf.c)
        w.emit(f"if {x} == {b}:")
        w.level += 1
        w.emit(f"{out} = 1.0")
        w.level -= 1
        w.emit(f"elif {x} <= {a} or {x} >= {c}:")
        w.level += 1
        w.emit(f"{out} = 0.0")
        w.level -= 1
        w.emit(f"elif {x} < {b}:")
        w.level += 1
        w.emit(f"{out} = ({x} - {a}) / ({b} - {a})")
        w.level -= 1
        w.emit("else:")
        w.level += 1
        w.emit(f"{out} = ({c} - {x}) / ({c} - {b})")
        w.level -= 1
        return
    if isinstance(mf, Trapezoidal):
        a, b, c, d = lit(mf.a), lit(mf.b), lit(mf.c), lit(mf.d)
        w.emit(f"if {b} <= {x} <= {c}:")
        w.level += 1
        w.emit(f"{out} = 1.0")
        w.level -= 1
        w.emit(f"elif {x} <= {a} or {x} >= {d}:")
        w.level += 1
        w.emit(f"{out} = 0.0")
        w.level -= 1
        w.emit(f"elif {x} < {b}:")
        w.level += 1
        w.emit(f"{out} = ({x} - {a}) / ({b} - {a})")
        w.level -= 1
        w.emit("else:")
        w.level += 1
        w.emit(f"{out} = ({d} - {x}) / ({d} - {c})")
        w.level -= 1
        return
    if isinstance(mf, Gaussian):
        d = w.sym("_d")
        w.emit(f"{d} = {x} - {lit(mf.mu)}")
        w.emit(f"{out} = exp(-({d} * {d}) / "
               f"(2.0 * {lit(mf.sigma)} * {lit(mf.sigma)}))")
        return
    if isinstance(mf, Singleton):
        w.emit(f"{out} = 1.0 if {x} == {lit(mf.c)} else 0.0")
        return
    if isinstance(mf, GeneralizedBell):
        t = w.sym("_t")
        z = w.sym("_z")
        w.emit(f"{t} = abs(({x} - {lit(mf.c)}) / {lit(mf.a)})")
        w.emit(f"if {t} == 0.0:")
        w.level += 1
        w.emit(f"{out} = 1.0")
        w.level -= 1
        w.emit("else:")
        w.level += 1
        w.emit(f"{z} = 2.0 * {lit(mf.b)} * log({t})")
        w.emit(f"if {z} >= 709.0:")
        w.level += 1
        w.emit(f"{out} = 0.0")
        w.level -= 1
        w.emit(f"elif {z} <= -709.0:")
        w.level += 1
        w.emit(f"{out} = 1.0")
        w.level -= 1
        w.emit("else:")
        w.level += 1
        w.emit(f"{out} = 1.0 / (1.0 + exp({z}))")
        w.level -= 2
        return
    if isinstance(mf, Sigmoid):
        z = w.sym("_z")
        w.emit(f"{z} = {lit(-mf.a)} * ({x} - {lit(mf.c)})")
        w.emit(f"if {z} >= 709.0:")
        w.level += 1
        w.emit(f"{out} = 0.0")
        w.level -= 1
        w.emit(f"elif {z} <= -709.0:")
        w.level += 1
        w.emit(f"{out} = 1.0")
        w.level -= 1
        w.emit("else:")
        w.level += 1
        w.emit(f"{out} = 1.0 / (1.0 + exp({z}))")
        w.level -= 1
        return
    if isinstance(mf, PiecewiseLinear):
        xs = mf._xs
        ys = mf._ys
        px = w.sym("_px")
        py = w.sym("_py")
        k = w.sym("_k")
        w.emit(f"{px} = ({', '.join(repr(v) for v in xs)}{',' if len(xs) == 1 else ''})")
        w.emit(f"{py} = ({', '.join(repr(v) for v in ys)}{',' if len(ys) == 1 else ''})")
        w.emit(f"if {x} <= {px}[0]:")
        w.level += 1
        w.emit(f"{out} = {py}[0]")
        w.level -= 1
        w.emit(f"elif {x} >= {px}[-1]:")
        w.level += 1
        w.emit(f"{out} = {py}[-1]")
        w.level -= 1
        w.emit("else:")
        w.level += 1
        w.emit(f"{k} = 0")
        w.emit(f"while {px}[{k} + 1] <= {x}:")
        w.level += 1
        w.emit(f"{k} += 1")
        w.level -= 1
        w.emit(f"{out} = ({x} - {px}[{k}]) * ({py}[{k} + 1] - {py}[{k}]) / "
               f"({px}[{k} + 1] - {px}[{k}]) + {py}[{k}]")
        w.level -= 1
        return
    raise EvaluationError(f"cannot emit code for membership function {mf!r}")


def emit_tnorm(w: Writer, kind: TNorm, a: str, b: str, out: str) -> None:
    if kind is TNorm.MIN:
        w.emit(f"{out} = {a} if {a} < {b} else {b}")
    elif kind is TNorm.PROD:
        w.emit(f"{out} = {a} * {b}")
    elif kind is TNorm.LUKASIEWICZ:
        s = w.sym("_s")
        w.emit(f"{s} = {a} + {b} - 1.0")
        w.emit(f"{out} = {s} if {s} > 0.0 else 0.0")
    elif kind is TNorm.DRASTIC:
        w.emit(f"{out} = {b} if {a} == 1.0 else ({a} if {b} == 1.0 else 0.0)")
    elif kind is TNorm.NILPOTENT:
        w.emit(f"{out} = ({a} if {a} < {b} else {b}) "
               f"if {a} + {b} > 1.0 else 0.0")
    elif kind is TNorm.HAMACHER:
        w.emit(f"{out} = 0.0 if {a} == 0.0 and {b} == 0.0 "
               f"else {a} * {b} / ({a} + {b} - {a} * {b})")
    else:
        raise EvaluationError(f"unknown t-norm {kind!r}")


def emit_snorm(w: Writer, kind: SNorm, a: str, b: str, out: str) -> None:
    if kind is SNorm.MAX:
        w.emit(f"{out} = {a} if {a} > {b} else {b}")
    elif kind is SNorm.PROB_SUM:
        w.emit(f"{out} = {a} + {b} - {a} * {b}")
    elif kind is SNorm.BOUNDED_SUM:
        s = w.sym("_s")
        w.emit(f"{s} = {a} + {b}")
        w.emit(f"{out} = {s} if {s} < 1.0 else 1.0")
    elif kind is SNorm.DRASTIC:
        w.emit(f"{out} = {b} if {a} == 0.0 else ({a} if {b} == 0.0 else 1.0)")
    elif kind is SNorm.NILPOTENT:
        w.emit(f"{out} = ({a} if {a} > {b} else {b}) "
               f"if {a} + {b} < 1.0 else 1.0")
    elif kind is SNorm.EINSTEIN:
        w.emit(f"{out} = ({a} + {b}) / (1.0 + {a} * {b})")
    else:
        raise EvaluationError(f"unknown s-norm {kind!r}")


def emit_prop(w: Writer, prop, settings, membership) -> str:
    """Statements computing a proposition's truth degree; returns the name
    holding the result.  ``membership(variable, term)`` maps a relation to
    the local already holding its fuzzified degree."""
    if isinstance(prop, Relation):
        return membership(prop.variable, prop.term)
    if isinstance(prop, Not):
        inner = emit_prop(w, prop.operand, settings, membership)
        out = w.sym("_n")
        w.emit(f"{out} = 1.0 - {inner}")
        return out
    if isinstance(prop, And):
        a = emit_prop(w, prop.left, settings, membership)
        b = emit_prop(w, prop.right, settings, membership)
        out = w.sym("_a")
        emit_tnorm(w, settings.conjunction, a, b, out)
        return out
    if isinstance(prop, Or):
        a = emit_prop(w, prop.left, settings, membership)
        b = emit_prop(w, prop.right, settings, membership)
        out = w.sym("_o")
        emit_snorm(w, settings.disjunction, a, b, out)
        return out
    raise EvaluationError(f"cannot emit code for proposition {prop!r}")
