"""Compile a fuzzy system into standalone, dependency-free source text.

The emitted text contains one plain function (plus an optional
``from math import ...`` line) taking one float per input variable in
declaration order and returning one float per output.  Membership formulas,
norms, the aggregation loop and the defuzzifier are specialized with the
system's constants baked in; consequent curves are pre-sampled onto the
output grids at generation time.

Generated functions reproduce the interpreter bit for bit: antecedents use
the same scalar formulas (via ``_emit``), consequent rows are the very
arrays the interpreter caches, and grid reductions accumulate in the same
left-to-right order as the engine's ``cumsum`` totals.
"""

from __future__ import annotations

import textwrap
import types

from . import _emit
from .engine import _grid, _proposition_relations, _term_curve, _zero_fire_value
from .errors import CodegenError
from .mf import Gaussian, GeneralizedBell, Sigmoid
from .model import FuzzySystem, SugenoConstant, SugenoLinear, SystemKind
from .norms import Defuzzifier, Implication, SNorm

_WIDTH = 88


def _wrap_assignment(w: _emit.Writer, name: str, value) -> None:
    text = f"{name} = {value!r}"
    indent = "    " * w.level
    for line in textwrap.wrap(text, width=_WIDTH, initial_indent=indent,
                              subsequent_indent=indent + "    ",
                              break_long_words=False, break_on_hyphens=False):
        w.lines.append(line)


def _implicate_lines(w: _emit.Writer, kind: Implication, act: str, curve: str,
                     out: str) -> None:
    # Mirrors norms.implicate: np.minimum(curve, act) / act * curve.
    if kind is Implication.MIN:
        w.emit(f"{out} = {curve} if {curve} < {act} else {act}")
    else:
        w.emit(f"{out} = {act} * {curve}")


def _consequent_expr(value, params: dict[str, str]) -> str:
    if isinstance(value, SugenoConstant):
        return _emit.lit(value.value)
    parts = [f"{_emit.lit(c)} * {params[n]}" for n, c in value.coeffs]
    parts.append(_emit.lit(value.offset))
    return "(" + " + ".join(parts) + ")"


def generate(fis: FuzzySystem, function_name: str | None = None,
             inline_mfs: bool = True, antecedents_only: bool = False) -> str:
    """Emit standalone source for ``fis``.

    ``function_name`` overrides the (sanitized) system name;
    ``inline_mfs=False`` factors membership formulas into nested helper
    functions instead of inlining them; ``antecedents_only`` makes the
    function return the tuple of rule activations instead of crisp outputs.
    """
    if fis.kind is SystemKind.MAMDANI_IT2:
        raise CodegenError("codegen unsupported for interval type-2")
    taken = {"exp", "log", "abs"}
    fname = _emit.sanitize(function_name or fis.name, set(taken), fallback="f")
    taken.add(fname)
    params = {name: _emit.sanitize(name, taken) for name in fis.inputs}

    used: dict[tuple[str, str], str] = {}
    for rule in fis.rules:
        for rel in _proposition_relations(rule.antecedent):
            used.setdefault((rel.variable, rel.term), "")
    needs = set()
    for var_name, term in used:
        mf = fis.inputs[var_name].terms[term]
        if isinstance(mf, (Gaussian, Sigmoid)):
            needs.add("exp")
        elif isinstance(mf, GeneralizedBell):
            needs.update(("exp", "log"))

    w = _emit.Writer()
    if needs:
        w.emit(f"from math import {', '.join(sorted(needs))}")
        w.emit()
        w.emit()
    w.emit(f"def {fname}({', '.join(params.values())}):")
    w.level += 1
    ins = ", ".join(fis.inputs)
    outs = ", ".join(fis.outputs)
    if antecedents_only:
        w.emit(f'"""Rule activation vector of {fis.name!r} for ({ins})."""')
    else:
        w.emit(f'"""Map ({ins}) to ({outs}) by fuzzy inference ({fis.name!r})."""')

    helpers: dict = {}
    if not inline_mfs:
        for var_name, term in used:
            mf = fis.inputs[var_name].terms[term]
            if mf in helpers:
                continue
            helper = f"_mf{len(helpers)}"
            helpers[mf] = helper
            w.emit(f"def {helper}(_x):")
            w.level += 1
            _emit.emit_mf(w, mf, "_x", "_y")
            w.emit("return _y")
            w.level -= 1
    for j, key in enumerate(used):
        var_name, term = key
        used[key] = f"_m{j}"
        mf = fis.inputs[var_name].terms[term]
        w.emit(f"# {var_name} is {term}")
        if inline_mfs:
            _emit.emit_mf(w, mf, params[var_name], used[key])
        else:
            w.emit(f"{used[key]} = {helpers[mf]}({params[var_name]})")

    acts = []
    w.emit("# rule activations")
    for rule in fis.rules:
        expr = _emit.emit_prop(w, rule.antecedent, fis.settings,
                               lambda v, t: used[(v, t)])
        if rule.weight != 1.0:
            name = w.sym("_r")
            w.emit(f"{name} = {_emit.lit(rule.weight)} * {expr}")
            expr = name
        acts.append(expr)

    if antecedents_only:
        w.emit(f"return ({', '.join(acts)}{',' if len(acts) == 1 else ''})")
        w.level -= 1
        return w.text()

    results = []
    for o, (out_name, var) in enumerate(fis.outputs.items()):
        local = f"_out{o}"
        results.append(local)
        if fis.kind is SystemKind.SUGENO:
            _emit_sugeno_output(w, fis, out_name, var, o, local, acts, params)
        else:
            _emit_mamdani_output(w, fis, out_name, var, o, local, acts)
    w.emit(f"return ({', '.join(results)})" if len(results) > 1
           else f"return {results[0]}")
    w.level -= 1
    return w.text()


def _emit_sugeno_output(w, fis, out_name, var, o, local, acts, params) -> None:
    w.emit(f"# output {out_name}")
    num, den = f"_num{o}", f"_den{o}"
    w.emit(f"{num} = 0.0")
    w.emit(f"{den} = 0.0")
    for i, rule in enumerate(fis.rules):
        for rel in rule.consequents:
            if rel.variable != out_name:
                continue
            expr = _consequent_expr(var.terms[rel.term], params)
            w.emit(f"{num} = {num} + {acts[i]} * {expr}")
            w.emit(f"{den} = {den} + {acts[i]}")
    zero = _emit.lit(_zero_fire_value(fis, out_name, var))
    w.emit(f"{local} = {num} / {den} if {den} > 0.0 else {zero}")


def _emit_mamdani_output(w, fis, out_name, var, o, local, acts) -> None:
    settings = fis.settings
    resolution = settings.resolution
    xs = _grid(fis, var, resolution)
    grouped = settings.aggregation is SNorm.MAX

    if grouped:
        # Terms reached by any rule, in declaration order; each contributes
        # its strongest activation (exact under max-aggregation).
        mentioned = {rel.term for rule in fis.rules for rel in rule.consequents
                     if rel.variable == out_name}
        terms = [t for t in var.terms if t in mentioned]
        contributions = None
    else:
        terms = []
        contributions = []  # (rule index, term) pairs in rule order
        for i, rule in enumerate(fis.rules):
            for rel in rule.consequents:
                if rel.variable != out_name:
                    continue
                if rel.term not in terms:
                    terms.append(rel.term)
                contributions.append((i, rel.term))

    w.emit(f"# output {out_name}: grid of {resolution} points with "
           f"pre-sampled term curves (trimmed to their nonzero support)")
    _wrap_assignment(w, f"_xs{o}", tuple(float(x) for x in xs))
    col_names = {}
    col_starts = {}
    for k, t in enumerate(terms):
        col = [float(v) for v in _term_curve(fis, var, t, resolution)]
        live = [j for j, c in enumerate(col) if c != 0.0]
        if not live:
            col_names[t] = None  # curve is identically zero on the grid
            continue
        col_names[t] = f"_col{o}_{k}"
        col_starts[t] = live[0]
        _wrap_assignment(w, col_names[t], tuple(col[live[0]:live[-1] + 1]))

    if grouped:
        strengths = {}
        for k, t in enumerate(terms):
            strengths[t] = f"_s{o}_{k}"
            w.emit(f"{strengths[t]} = 0.0  # strength of {t}")
        for i, rule in enumerate(fis.rules):
            for rel in rule.consequents:
                if rel.variable != out_name:
                    continue
                s = strengths[rel.term]
                w.emit(f"if {acts[i]} > {s}:")
                w.level += 1
                w.emit(f"{s} = {acts[i]}")
                w.level -= 1

    # Zero-strength terms leave the curve untouched (implication yields 0,
    # aggregation with 0 is the identity), so they are skipped outright.
    w.emit(f"_mus{o} = [0.0] * {resolution}")
    passes = ([(strengths[t], t) for t in terms] if grouped
              else [(acts[i], t) for i, t in contributions])
    for act, t in passes:
        if col_names[t] is None:
            continue
        start = col_starts[t]
        offset = f", {start}" if start else ""
        w.emit(f"if {act} > 0.0:")
        w.level += 1
        w.emit(f"for _j, _c in enumerate({col_names[t]}{offset}):")
        w.level += 1
        _implicate_lines(w, settings.implication, act, "_c", "_v")
        if grouped:
            w.emit(f"if _v > _mus{o}[_j]:")
            w.level += 1
            w.emit(f"_mus{o}[_j] = _v")
            w.level -= 1
        else:
            w.emit(f"_mu = _mus{o}[_j]")
            _emit.emit_snorm(w, settings.aggregation, "_mu", "_v", "_mu")
            w.emit(f"_mus{o}[_j] = _mu")
        w.level -= 2

    defuzz = settings.defuzzifier
    zero = _emit.lit(_zero_fire_value(fis, out_name, var))
    if defuzz is Defuzzifier.CENTROID:
        w.emit(f"_num{o} = 0.0")
        w.emit(f"_den{o} = 0.0")
        w.emit(f"for _x, _v in zip(_xs{o}, _mus{o}):")
        w.level += 1
        w.emit(f"_den{o} = _den{o} + _v")
        w.emit(f"_num{o} = _num{o} + _x * _v")
        w.level -= 1
        w.emit(f"{local} = _num{o} / _den{o} if _den{o} > 0.0 else {zero}")
        return

    if defuzz is Defuzzifier.BISECTOR:
        w.emit(f"_tot{o} = 0.0")
        w.emit(f"for _v in _mus{o}:")
        w.level += 1
        w.emit(f"_tot{o} = _tot{o} + _v")
        w.level -= 1
        w.emit(f"if _tot{o} > 0.0:")
        w.level += 1
        w.emit(f"_half = 0.5 * _tot{o}")
        w.emit("_acc = 0.0")
        w.emit(f"for _x, _v in zip(_xs{o}, _mus{o}):")
        w.level += 1
        w.emit("_acc = _acc + _v")
        w.emit("if _acc >= _half:")
        w.level += 1
        w.emit(f"{local} = _x")
        w.emit("break")
        w.level -= 2
    else:
        w.emit(f"_top{o} = 0.0")
        w.emit(f"for _v in _mus{o}:")
        w.level += 1
        w.emit(f"if _v > _top{o}:")
        w.level += 1
        w.emit(f"_top{o} = _v")
        w.level -= 2
        w.emit(f"if _top{o} > 0.0:")
        w.level += 1
        if defuzz is Defuzzifier.FIRST_OF_MAXIMA:
            w.emit(f"for _x, _v in zip(_xs{o}, _mus{o}):")
            w.level += 1
            w.emit(f"if _v == _top{o}:")
            w.level += 1
            w.emit(f"{local} = _x")
            w.emit("break")
            w.level -= 2
        elif defuzz is Defuzzifier.LAST_OF_MAXIMA:
            w.emit(f"for _x, _v in zip(_xs{o}, _mus{o}):")
            w.level += 1
            w.emit(f"if _v == _top{o}:")
            w.level += 1
            w.emit(f"{local} = _x")
            w.level -= 2
        else:  # mean of maxima
            w.emit("_sum = 0.0")
            w.emit("_cnt = 0")
            w.emit(f"for _x, _v in zip(_xs{o}, _mus{o}):")
            w.level += 1
            w.emit(f"if _v == _top{o}:")
            w.level += 1
            w.emit("_sum = _sum + _x")
            w.emit("_cnt += 1")
            w.level -= 2
            w.emit(f"{local} = _sum / _cnt")
    w.level -= 1
    w.emit("else:")
    w.level += 1
    w.emit(f"{local} = {zero}")
    w.level -= 1


def load(source: str):
    """Execute generated source and return the function it defines."""
    ns: dict = {}
    exec(compile(source, "<generated>", "exec"), ns)
    fns = [v for v in ns.values() if isinstance(v, types.FunctionType)]
    if len(fns) != 1:
        raise CodegenError(f"expected exactly one function, found {len(fns)}")
    return fns[0]
