"""Inference engines: Mamdani, Sugeno and interval type-2 Mamdani.

The Mamdani pipeline discretizes each output domain on a uniform grid,
shapes every consequent term by its rule activation, folds the shaped curves
with the aggregation s-norm and defuzzifies.  Reductions over grids use
sequential (left-to-right) summation via ``np.cumsum`` so that code emitted
by ``codegen``, which accumulates in plain Python loops, reproduces the
interpreter bit for bit.

All entry points are pure: they never mutate the system or the inputs, so a
validated system can serve concurrent callers.  The per-system curve cache
is a benign-race memo table (redundant fills compute identical arrays).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _emit
from .errors import EvaluationError, MissingInputError
from .model import (And, FuzzySystem, Not, Or, Proposition, Relation,
                    SugenoConstant, SugenoLinear, SystemKind, Variable)
from .norms import (Defuzzifier, Implication, SNorm, implicate, snorm,
                    snorm_arrays, tnorm)

_KM_MAX_ITER = 100


@dataclass(frozen=True)
class FiringVector:
    """Per-rule activation strengths, in rule declaration order."""

    activations: tuple[float, ...]

    def __len__(self) -> int:
        return len(self.activations)

    def __iter__(self):
        return iter(self.activations)

    def __getitem__(self, i):
        return self.activations[i]


@dataclass(frozen=True, eq=False)
class SampledCurve:
    """Membership curve sampled on a uniform grid (arrays are read-only)."""

    xs: np.ndarray
    mus: np.ndarray


@dataclass(frozen=True, eq=False)
class CurveBand:
    """Lower/upper aggregated curves of an interval type-2 output."""

    lower: SampledCurve
    upper: SampledCurve


@dataclass(frozen=True, eq=False)
class InferenceResult:
    """Outcome of one inference run.

    ``crisp`` maps each output name to its defuzzified value.  ``degenerate``
    lists outputs whose aggregated curve was identically zero (their crisp
    value is the zero-fire fallback).  Type-1 runs fill ``firing`` and, for
    Mamdani, ``aggregated``; interval type-2 runs fill ``firing_intervals``,
    ``intervals`` (the type-reduced [y_left, y_right] per output) and band
    curves in ``aggregated``.
    """

    crisp: dict
    firing: FiringVector | None
    aggregated: dict | None
    degenerate: tuple[str, ...] = ()
    intervals: dict | None = None
    firing_intervals: tuple | None = None


def _input_values(fis: FuzzySystem, inputs) -> dict:
    values = {}
    for name in fis.inputs:
        if name not in inputs:
            raise MissingInputError(name)
        values[name] = float(inputs[name])
    return values


def _fuzzify(fis: FuzzySystem, values: dict) -> dict:
    table = {}
    for name, var in fis.inputs.items():
        x = values[name]
        for term, mf in var.terms.items():
            table[(name, term)] = mf(x)
    return table


def _fuzzify_interval(fis: FuzzySystem, values: dict) -> dict:
    table = {}
    for name, var in fis.inputs.items():
        x = values[name]
        for term, pair in var.terms.items():
            table[(name, term)] = (pair.lower(x), pair.upper(x))
    return table


def _eval_table(p: Proposition, settings, table) -> float:
    kind = type(p)
    if kind is Relation:
        return table[(p.variable, p.term)]
    if kind is And:
        return tnorm(settings.conjunction,
                     _eval_table(p.left, settings, table),
                     _eval_table(p.right, settings, table))
    if kind is Or:
        return snorm(settings.disjunction,
                     _eval_table(p.left, settings, table),
                     _eval_table(p.right, settings, table))
    if kind is Not:
        return 1.0 - _eval_table(p.operand, settings, table)
    raise EvaluationError(f"unsupported proposition node {p!r}")


def _eval_table_interval(p: Proposition, settings, table) -> tuple[float, float]:
    kind = type(p)
    if kind is Relation:
        return table[(p.variable, p.term)]
    if kind is And:
        a = _eval_table_interval(p.left, settings, table)
        b = _eval_table_interval(p.right, settings, table)
        op = settings.conjunction
        return (tnorm(op, a[0], b[0]), tnorm(op, a[1], b[1]))
    if kind is Or:
        a = _eval_table_interval(p.left, settings, table)
        b = _eval_table_interval(p.right, settings, table)
        op = settings.disjunction
        return (snorm(op, a[0], b[0]), snorm(op, a[1], b[1]))
    if kind is Not:
        lo, hi = _eval_table_interval(p.operand, settings, table)
        return (1.0 - hi, 1.0 - lo)
    raise EvaluationError(f"unsupported proposition node {p!r}")


def eval_proposition(p: Proposition, fis: FuzzySystem, inputs) -> float:
    """Truth degree of an antecedent expression under the given inputs.

    Uses the system's conjunction/disjunction operators; negation is strong
    (1 - x).  Pure: identical arguments give bitwise-identical results.
    """
    values = _input_values(fis, inputs)
    if fis.kind is SystemKind.MAMDANI_IT2:
        raise EvaluationError("interval type-2 antecedents evaluate to intervals; "
                              "use infer() on the system instead")
    for rel in _proposition_relations(p):
        var = fis.inputs.get(rel.variable)
        if var is None:
            raise EvaluationError(f"proposition references unknown input {rel.variable!r}")
        if rel.term not in var.terms:
            raise EvaluationError(
                f"variable {rel.variable!r} has no term {rel.term!r}")
    table = _fuzzify(fis, values)
    return _eval_table(p, fis.settings, table)


def _proposition_relations(p: Proposition):
    stack = [p]
    while stack:
        node = stack.pop()
        if isinstance(node, Relation):
            yield node
        elif isinstance(node, Not):
            stack.append(node.operand)
        elif isinstance(node, (And, Or)):
            stack.append(node.left)
            stack.append(node.right)
        else:
            raise EvaluationError(f"unsupported proposition node {node!r}")


def _compile_fire(fis: FuzzySystem):
    """Specialize rule firing for one system into a compiled function.

    The emitted statements perform exactly the operations of ``_fuzzify`` +
    ``_eval_table`` (same scalar formulas, same order), so the compiled path
    is bit-identical to the tree walk; it only removes interpretive
    dispatch from the hot loop.
    """
    w = _emit.Writer()
    w.emit("def _fire(_values):")
    w.level += 1
    input_locals = {}
    for i, name in enumerate(fis.inputs):
        local = f"_x{i}"
        input_locals[name] = local
        w.emit(f"{local} = _values[{name!r}]")
    used: dict[tuple[str, str], str] = {}
    for rule in fis.rules:
        for rel in _proposition_relations(rule.antecedent):
            used.setdefault((rel.variable, rel.term), "")
    for j, key in enumerate(used):
        var_name, term = key
        used[key] = f"_m{j}"
        w.emit(f"# {var_name} == {term}")
        _emit.emit_mf(w, fis.inputs[var_name].terms[term],
                      input_locals[var_name], used[key])
    acts = []
    for rule in fis.rules:
        expr = _emit.emit_prop(w, rule.antecedent, fis.settings,
                               lambda v, t: used[(v, t)])
        if rule.weight != 1.0:
            name = w.sym("_r")
            w.emit(f"{name} = {_emit.lit(rule.weight)} * {expr}")
            expr = name
        acts.append(expr)
    w.emit(f"return ({', '.join(acts)}{',' if len(acts) == 1 else ''})")
    ns = {"exp": math.exp, "log": math.log, "abs": abs, "__builtins__": {}}
    exec(compile(w.text(), "<rule firing>", "exec"), ns)
    return ns["_fire"]


def _fire_fn(fis: FuzzySystem):
    cache = fis._curve_cache
    fn = cache.get("fire")
    if fn is None:
        fn = _compile_fire(fis)
        cache["fire"] = fn
    return fn


def fire_rules(fis: FuzzySystem, inputs) -> FiringVector:
    """Activation of every rule: weight times antecedent truth degree."""
    if fis.kind is SystemKind.MAMDANI_IT2:
        raise EvaluationError("interval type-2 rules fire over intervals; use infer()")
    values = _input_values(fis, inputs)
    return FiringVector(_fire_fn(fis)(values))


def fire_rules_interval(fis: FuzzySystem, inputs) -> tuple[tuple[float, float], ...]:
    """Interval activations [lower, upper] of every rule of a type-2 system."""
    if fis.kind is not SystemKind.MAMDANI_IT2:
        raise EvaluationError("fire_rules_interval requires an interval type-2 system")
    values = _input_values(fis, inputs)
    table = _fuzzify_interval(fis, values)
    settings = fis.settings
    out = []
    for rule in fis.rules:
        lo, hi = _eval_table_interval(rule.antecedent, settings, table)
        out.append((rule.weight * lo, rule.weight * hi))
    return tuple(out)


def _grid(fis: FuzzySystem, var: Variable, resolution: int) -> np.ndarray:
    cache = fis._curve_cache
    key = ("grid", var.name, resolution)
    grid = cache.get(key)
    if grid is None:
        grid = var.domain.grid(resolution)
        grid.setflags(write=False)
        cache[key] = grid
    return grid


def _term_curve(fis: FuzzySystem, var: Variable, term: str,
                resolution: int, bound: str | None = None) -> np.ndarray:
    cache = fis._curve_cache
    key = (var.name, term, resolution, bound)
    curve = cache.get(key)
    if curve is None:
        mf = var.terms[term]
        if bound is not None:
            mf = mf.lower if bound == "lower" else mf.upper
        curve = mf.sample(_grid(fis, var, resolution))
        curve.setflags(write=False)
        cache[key] = curve
    return curve


def _grouped_strengths(fis: FuzzySystem, var_name: str, activations) -> dict:
    """Max activation per consequent term.

    Valid only under max-aggregation, where folding term-wise maxima through
    min/prod implication is pointwise exact:
    max(imp(a1, C), imp(a2, C)) == imp(max(a1, a2), C).
    """
    strengths = {}
    for rule, act in zip(fis.rules, activations):
        for rel in rule.consequents:
            if rel.variable != var_name:
                continue
            prev = strengths.get(rel.term, 0.0)
            strengths[rel.term] = act if act > prev else prev
    return strengths


def _aggregate_t1(fis: FuzzySystem, var: Variable, activations) -> np.ndarray | None:
    settings = fis.settings
    resolution = settings.resolution
    agg = None
    if settings.aggregation is SNorm.MAX:
        strengths = _grouped_strengths(fis, var.name, activations)
        for term in var.terms:
            act = strengths.get(term, 0.0)
            if act == 0.0:
                continue
            shaped = implicate(settings.implication, act,
                               _term_curve(fis, var, term, resolution))
            agg = shaped if agg is None else np.maximum(agg, shaped)
    else:
        for rule, act in zip(fis.rules, activations):
            for rel in rule.consequents:
                if rel.variable != var.name or act == 0.0:
                    continue
                shaped = implicate(settings.implication, act,
                                   _term_curve(fis, var, rel.term, resolution))
                agg = shaped if agg is None else snorm_arrays(settings.aggregation, agg, shaped)
    return agg


def defuzzify(kind: Defuzzifier, xs: np.ndarray, mus: np.ndarray) -> float:
    """Crisp value of a sampled curve.

    An identically-zero curve yields the grid midpoint.  Sums run in
    ascending grid order (``cumsum`` totals) to stay bit-compatible with
    generated code.
    """
    xs = np.asarray(xs, dtype=float)
    mus = np.asarray(mus, dtype=float)
    mid = 0.5 * (float(xs[0]) + float(xs[-1]))
    if kind is Defuzzifier.CENTROID:
        den = float(np.cumsum(mus)[-1])
        if den <= 0.0:
            return mid
        num = float(np.cumsum(xs * mus)[-1])
        return num / den
    if kind is Defuzzifier.BISECTOR:
        cum = np.cumsum(mus)
        total = float(cum[-1])
        if total <= 0.0:
            return mid
        half = 0.5 * total
        return float(xs[int(np.searchsorted(cum, half, side="left"))])
    top = float(np.max(mus))
    if top <= 0.0:
        return mid
    at_top = np.nonzero(mus == top)[0]
    if kind is Defuzzifier.FIRST_OF_MAXIMA:
        return float(xs[at_top[0]])
    if kind is Defuzzifier.LAST_OF_MAXIMA:
        return float(xs[at_top[-1]])
    if kind is Defuzzifier.MEAN_OF_MAXIMA:
        picked = xs[at_top]
        return float(np.cumsum(picked)[-1]) / len(picked)
    raise EvaluationError(f"unknown defuzzifier {kind!r}")


def _zero_fire_value(fis: FuzzySystem, name: str, var: Variable) -> float:
    return fis.zero_fire_defaults.get(name, var.domain.midpoint)


def infer_mamdani(fis: FuzzySystem, inputs) -> InferenceResult:
    """Full Mamdani pipeline: fire, implicate, aggregate, defuzzify."""
    if fis.kind is not SystemKind.MAMDANI:
        raise EvaluationError(f"infer_mamdani requires a Mamdani system, got {fis.kind.value}")
    firing = fire_rules(fis, inputs)
    activations = firing.activations
    resolution = fis.settings.resolution
    crisp = {}
    aggregated = {}
    degenerate = []
    for name, var in fis.outputs.items():
        xs = _grid(fis, var, resolution)
        agg = _aggregate_t1(fis, var, activations)
        if agg is None:
            agg = np.zeros(resolution)
        fired = bool(np.any(agg))
        agg.setflags(write=False)
        aggregated[name] = SampledCurve(xs, agg)
        if fired:
            crisp[name] = defuzzify(fis.settings.defuzzifier, xs, agg)
        else:
            crisp[name] = _zero_fire_value(fis, name, var)
            degenerate.append(name)
    return InferenceResult(crisp=crisp, firing=firing, aggregated=aggregated,
                           degenerate=tuple(degenerate))


def _sugeno_value(consequent, values: dict) -> float:
    if isinstance(consequent, SugenoConstant):
        return consequent.value
    acc = None
    for name, coeff in consequent.coeffs:
        part = coeff * values[name]
        acc = part if acc is None else acc + part
    return consequent.offset if acc is None else acc + consequent.offset


def infer_sugeno(fis: FuzzySystem, inputs) -> InferenceResult:
    """Sugeno pipeline: activation-weighted average of crisp consequents."""
    if fis.kind is not SystemKind.SUGENO:
        raise EvaluationError(f"infer_sugeno requires a Sugeno system, got {fis.kind.value}")
    values = _input_values(fis, inputs)
    firing = fire_rules(fis, inputs)
    activations = firing.activations
    crisp = {}
    degenerate = []
    for name, var in fis.outputs.items():
        num = 0.0
        den = 0.0
        for rule, act in zip(fis.rules, activations):
            for rel in rule.consequents:
                if rel.variable != name:
                    continue
                num = num + act * _sugeno_value(var.terms[rel.term], values)
                den = den + act
        if den <= 0.0:
            crisp[name] = _zero_fire_value(fis, name, var)
            degenerate.append(name)
        else:
            crisp[name] = num / den
    return InferenceResult(crisp=crisp, firing=firing, aggregated=None,
                           degenerate=tuple(degenerate))


def _aggregate_it2(fis: FuzzySystem, var: Variable, acts: tuple, bound: str,
                   resolution: int) -> np.ndarray | None:
    settings = fis.settings
    idx = 0 if bound == "lower" else 1
    agg = None
    if settings.aggregation is SNorm.MAX:
        strengths = {}
        for rule, pair in zip(fis.rules, acts):
            act = pair[idx]
            for rel in rule.consequents:
                if rel.variable != var.name:
                    continue
                prev = strengths.get(rel.term, 0.0)
                strengths[rel.term] = act if act > prev else prev
        for term in var.terms:
            act = strengths.get(term, 0.0)
            if act == 0.0:
                continue
            shaped = implicate(settings.implication, act,
                               _term_curve(fis, var, term, resolution, bound))
            agg = shaped if agg is None else np.maximum(agg, shaped)
    else:
        for rule, pair in zip(fis.rules, acts):
            act = pair[idx]
            for rel in rule.consequents:
                if rel.variable != var.name or act == 0.0:
                    continue
                shaped = implicate(settings.implication, act,
                                   _term_curve(fis, var, rel.term, resolution, bound))
                agg = shaped if agg is None else snorm_arrays(settings.aggregation, agg, shaped)
    return agg


def _km_candidate(xs, lower, upper, k: int, left: bool) -> float | None:
    # Switch index k: for the left bound, points 0..k take the upper
    # membership and the rest take the lower; mirrored for the right bound.
    if left:
        theta = np.concatenate([upper[:k + 1], lower[k + 1:]])
    else:
        theta = np.concatenate([lower[:k + 1], upper[k + 1:]])
    den = float(np.sum(theta))
    if den <= 0.0:
        return None
    return float(np.sum(xs * theta)) / den


def _km_candidate_range(n: int, left: bool) -> range:
    # k = n-1 for the left bound (and k = -1 for the right) selects the
    # all-upper assignment, needed when the lower curve carries no mass.
    return range(0, n) if left else range(-1, n - 1)


def _km_scan(xs, lower, upper, left: bool) -> float:
    best = None
    for k in _km_candidate_range(len(xs), left):
        c = _km_candidate(xs, lower, upper, k, left)
        if c is None:
            continue
        if best is None or (c < best if left else c > best):
            best = c
    if best is None:
        return 0.5 * (float(xs[0]) + float(xs[-1]))
    return best


def _km_bound(xs, lower, upper, y0: float, left: bool) -> float:
    n = len(xs)
    lo_k, hi_k = (0, n - 1) if left else (-1, n - 2)
    y = y0
    k_prev = None
    for _ in range(_KM_MAX_ITER):
        k = int(np.searchsorted(xs, y, side="right")) - 1
        k = min(max(k, lo_k), hi_k)
        if k == k_prev:
            break
        k_prev = k
        c = _km_candidate(xs, lower, upper, k, left)
        if c is None:
            return _km_scan(xs, lower, upper, left)
        y = c
    else:
        return _km_scan(xs, lower, upper, left)
    # Fixed point found; sweep immediate neighbours to absorb boundary
    # rounding in the switch-location step.
    best = None
    for k in (k_prev - 1, k_prev, k_prev + 1):
        if k < lo_k or k > hi_k:
            continue
        c = _km_candidate(xs, lower, upper, k, left)
        if c is None:
            continue
        if best is None or (c < best if left else c > best):
            best = c
    if best is None:
        return _km_scan(xs, lower, upper, left)
    return best


def km_reduce(xs, lower, upper) -> tuple[float, float]:
    """Karnik-Mendel type reduction of an interval membership band.

    Returns the centroid interval [y_left, y_right] over all embedded
    curves.  Starts from the type-1 centroid of the average curve and
    iterates switch points to a fixed point (hard cap 100 rounds, falling
    back to an exhaustive switch-point scan).  Identical inputs give
    bitwise-identical bounds.
    """
    xs = np.asarray(xs, dtype=float)
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    if not (len(xs) == len(lower) == len(upper)):
        raise EvaluationError("km_reduce needs three arrays of equal length")
    if len(xs) == 0:
        raise EvaluationError("km_reduce needs a nonempty grid")
    if len(xs) == 1:
        x = float(xs[0])
        return (x, x)
    avg = 0.5 * (lower + upper)
    total = float(np.sum(avg))
    if total <= 0.0:
        mid = 0.5 * (float(xs[0]) + float(xs[-1]))
        return (mid, mid)
    y0 = float(np.sum(xs * avg)) / total
    return (_km_bound(xs, lower, upper, y0, True),
            _km_bound(xs, lower, upper, y0, False))


def infer_it2_mamdani(fis: FuzzySystem, inputs) -> InferenceResult:
    """Interval type-2 Mamdani pipeline with Karnik-Mendel type reduction.

    Crisp output is the midpoint of the type-reduced interval.
    """
    if fis.kind is not SystemKind.MAMDANI_IT2:
        raise EvaluationError(
            f"infer_it2_mamdani requires an interval type-2 system, got {fis.kind.value}")
    acts = fire_rules_interval(fis, inputs)
    resolution = fis.settings.resolution
    crisp = {}
    aggregated = {}
    intervals = {}
    degenerate = []
    for name, var in fis.outputs.items():
        xs = _grid(fis, var, resolution)
        agg_lo = _aggregate_it2(fis, var, acts, "lower", resolution)
        agg_hi = _aggregate_it2(fis, var, acts, "upper", resolution)
        if agg_lo is None:
            agg_lo = np.zeros(resolution)
        if agg_hi is None:
            agg_hi = np.zeros(resolution)
        agg_lo.setflags(write=False)
        agg_hi.setflags(write=False)
        aggregated[name] = CurveBand(SampledCurve(xs, agg_lo), SampledCurve(xs, agg_hi))
        if not np.any(agg_hi):
            value = _zero_fire_value(fis, name, var)
            crisp[name] = value
            intervals[name] = (value, value)
            degenerate.append(name)
            continue
        y_left, y_right = km_reduce(xs, agg_lo, agg_hi)
        intervals[name] = (y_left, y_right)
        crisp[name] = 0.5 * (y_left + y_right)
    return InferenceResult(crisp=crisp, firing=None, aggregated=aggregated,
                           degenerate=tuple(degenerate), intervals=intervals,
                           firing_intervals=acts)


def infer(fis: FuzzySystem, inputs) -> InferenceResult:
    """Run the pipeline matching the system's kind."""
    if fis.kind is SystemKind.MAMDANI:
        return infer_mamdani(fis, inputs)
    if fis.kind is SystemKind.SUGENO:
        return infer_sugeno(fis, inputs)
    return infer_it2_mamdani(fis, inputs)


def grouped_max_output(fis: FuzzySystem, inputs, gray_levels: int,
                       first_rules, second_rules) -> float:
    """Two-group competitive readout over rule activations.

    The two index groups partition the rules into opposing evidence pools;
    the strongest activation of each pool competes against an abstention
    mass and the result is scaled to the signed range of ``gray_levels``
    levels:

        l1 = max(first), l2 = max(second), l0 = max(0, 1 - l1 - l2)
        y  = (gray_levels - 1) * (l1 - l2) / (l1 + l2 + l0)
    """
    if gray_levels < 2:
        raise EvaluationError(f"gray_levels must be at least 2, got {gray_levels}")
    first = tuple(first_rules)
    second = tuple(second_rules)
    if not first or not second:
        raise EvaluationError("both rule groups must be nonempty")
    n = len(fis.rules)
    for idx in (*first, *second):
        if not 0 <= idx < n:
            raise EvaluationError(f"rule index {idx} out of range for {n} rules")
    if set(first) & set(second):
        raise EvaluationError("rule groups must be disjoint")
    acts = fire_rules(fis, inputs).activations
    l1 = max(acts[i] for i in first)
    l2 = max(acts[i] for i in second)
    l0 = max(0.0, 1.0 - l1 - l2)
    return (gray_levels - 1) * (l1 - l2) / (l1 + l2 + l0)


def denoise_detector(fis: FuzzySystem, inputs, gray_levels: int = 256) -> float:
    """Canonical impulse-noise detector binding: rules 1-13 vote positive,
    rules 14-26 vote negative."""
    if len(fis.rules) != 26:
        raise EvaluationError(
            f"denoise detector expects exactly 26 rules, got {len(fis.rules)}")
    return grouped_max_output(fis, inputs, gray_levels, range(0, 13), range(13, 26))
