"""Every applicable exact check on a scene, assembled into a report tree."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from ..actions import (
    average,
    average_quadrature,
    descending_tangent,
    invariant_codistribution,
    is_invariant,
    vertical_distribution,
)
from ..calculus import OneForm, Section, VectorField, courant_bracket, exterior_derivative_fn
from ..dirac import check_dirac_action, check_integrable, spanning_hypothesis_probe, verify_descending
from ..distributions import Distribution, combine, eval_at, membership_generic
from ..dynamics import reduce_hamiltonian, solve_admissible
from ..errors import DiracRedError
from ..reduction import module_contains, module_equal, pushforward_vf, reduced_dirac
from ..report import Node, failed, passed, skipped, verdict, warned
from ..sampling import random_points
from .model import Scene


@dataclass(frozen=True)
class Options:
    bound: int = 4
    seed: int = 0
    samples: int = 20
    stratum: str | None = None
    workers: int = 4


def _pt(p) -> str:
    return "(" + ", ".join(str(Fraction(v)) for v in p) + ")"


def _error_node(name, exc):
    return failed(name, f"{type(exc).__name__}: {exc}")


# -- individual checks ----------------------------------------------------------------------------


def check_dirac(scene: Scene, opts: Options) -> Node:
    d = scene.dirac
    node = Node("dirac structure")
    for c in d.certificates:
        node.add(passed(c))
    if d.dropped:
        node.add(passed("over-complete presentation", f"dependent generators {list(d.dropped)} dropped"))
    for w in d.warnings:
        node.add(warned("degeneracy", w))
    bad = []
    for p in scene.samples:
        here = eval_at(d.distribution, p)
        if not here.orthogonal().same_span(here):
            bad.append(_pt(p))
    if scene.samples:
        node.add(verdict("Lagrangian at samples", not bad, f"{len(scene.samples)} sample(s)", bad))
    return node


def check_integrability(scene: Scene, opts: Options) -> Node:
    res = check_integrable(scene.dirac)
    gens = scene.dirac.generators
    node = Node("integrability")
    for (i, j), w in sorted(res.results.items()):
        label = f"[g{i + 1}, g{j + 1}]"
        if w:
            node.add(passed(label, "in D"))
        else:
            br = courant_bracket(gens[i], gens[j])
            node.add(failed(label, f"bracket {br} is not in D", [w]))
    if not node.children:
        node.add(passed("single generator"))
    return node


def check_symmetry(scene: Scene, opts: Options) -> Node:
    node = Node("group action")
    node.add(passed("action map", f"{scene.action.kind}; identity and generator derivatives verified"))
    node.add(passed("invariant basis", ", ".join(f"{n} = {f}" for n, f in zip(scene.invariants.names, scene.invariants.fns))))
    if scene.action.kind == "trivial":
        node.add(skipped("dirac action", "trivial group"))
        return node
    res = check_dirac_action(scene.dirac, scene.action)
    fails = [f"L_xi{k + 1} of g{i + 1}: {w}" for (i, k), w in sorted(res.results.items()) if not w]
    node.add(verdict("dirac action", not fails, "Lie derivatives of generators stay in D", fails))
    return node


def check_fields(scene: Scene, opts: Options) -> Node:
    node = Node("declared fields")
    if not scene.fields:
        node.add(skipped("fields", "scene declares no fields"))
        return node
    vert = vertical_distribution(scene.action)
    for f in scene.fields:
        sub = node.add(Node(f.name))
        if f.role == "invariant":
            cert = is_invariant(f.field, scene.action)
            sub.add(verdict("invariant", bool(cert), str(f.field), [r for _, r in cert.residuals]))
        else:
            w = membership_generic(Section.tangent(f.field), vert) if vert.generators else None
            ok = f.field.is_zero() or bool(w)
            sub.add(verdict("vertical", ok, str(f.field), [] if ok else [w]))
        try:
            pf = pushforward_vf(f.field, scene.quotient, opts.bound, scene.samples)
        except DiracRedError as exc:
            sub.add(_error_node("pushforward", exc))
            continue
        if f.pushforward is None:
            sub.add(passed("pushforward", str(pf)))
        else:
            sub.add(verdict("pushforward", pf == f.pushforward, f"computed {pf}; golden {f.pushforward}"))
    return node


def check_descending(scene: Scene, opts: Options) -> Node:
    node = Node("descending sections")
    if not scene.descending:
        node.add(skipped("candidates", "scene lists no descending sections"))
        return node
    ds = verify_descending(scene.descending, scene.dirac, scene.action, scene.samples)
    for rep, cand in zip(ds.reports, scene.descending):
        node.add(verdict(rep.name, rep.ok, str(cand.section), [f"failed: {', '.join(rep.failed())}"] if not rep.ok else []))
    return node


def probe_points(scene: Scene, opts: Options):
    pts = list(scene.samples)
    if opts.samples:
        pts += random_points(scene.chart.dim, opts.samples, opts.seed)
    return pts


def _probe(scene: Scene, pts):
    t = descending_tangent(scene.action, scene.declared_invariant_fields)
    vog = invariant_codistribution(scene.invariants)
    ds = verify_descending(scene.descending, scene.dirac, scene.action)
    return spanning_hypothesis_probe(scene.dirac, t, vog, ds, pts)


def check_probe(scene: Scene, opts: Options) -> Node:
    if not scene.descending:
        return skipped("spanning probe", "scene lists no descending sections")
    pts = probe_points(scene, opts)
    rep = _probe(scene, pts)
    bad = [
        f"{_pt(s.point)}: descending rank {s.descending_rank}, D meet (T + V°_G) rank {s.intersection_rank}"
        for s in rep.samples if not s.equal
    ]
    detail = f"{len(pts)} point(s), {len(scene.samples)} bundled and {len(pts) - len(scene.samples)} seeded (seed {opts.seed})"
    if "probe" in scene.expect:
        detail += f"; scene expects {scene.expect['probe']}"
    return verdict("spanning probe", rep.ok, detail, bad)


def _strata(scene: Scene, opts: Options):
    if opts.stratum is None:
        return list(scene.strata)
    return [scene.stratum(opts.stratum)]


def reduce_stratum(scene: Scene, st, opts: Options, integrable: bool):
    ds = verify_descending(scene.descending, scene.dirac, scene.action)
    return reduced_dirac(ds, scene.quotient, st.chart, opts.bound, check_brackets=integrable, seed=opts.seed)


def check_stratum(scene: Scene, st, opts: Options, integrable: bool) -> Node:
    node = Node(f"stratum {st.name}")
    chart = st.chart
    for p in chart.upstairs:
        image = [f.evaluate(p) for f in scene.invariants.fns]
        bad = [str(h) for h in chart.locus if h.evaluate(image) != 0]
        node.add(verdict(f"upstairs {_pt(p)}", not bad, f"maps to {_pt(image)}", bad))
    if chart.upstairs:
        rep = _probe(scene, chart.upstairs)
        bad = [_pt(s.point) for s in rep.samples if not s.equal]
        node.add(verdict("spanning hypothesis at upstairs samples", rep.ok, f"{len(chart.upstairs)} sample(s)", bad))
    try:
        red = reduce_stratum(scene, st, opts, integrable)
    except DiracRedError as exc:
        node.add(_error_node("reduction", exc))
        return node
    node.add(passed("reduced structure", f"rank {red.rank} on {chart.params.name}{tuple(chart.params.coords)}: {red.span_str()}"))
    if st.expected:
        ok = module_equal(red.generators, list(st.expected), chart.params)
        golden = "span{" + ", ".join(str(g) for g in st.expected) + "}"
        node.add(verdict("golden generators", ok, f"module-equal to {golden}"))
    if st.auxiliary is not None:
        w = membership_generic(st.auxiliary, Distribution.pontryagin(chart.params, list(st.expected)))
        if not w:
            node.add(failed("auxiliary relation", f"{st.auxiliary} is not in the golden span", [w]))
        else:
            want = [chart.params.zero() for _ in st.expected]
            for k, c in st.auxiliary_witness:
                want[k - 1] = c
            inside = all(module_contains(red.generators, [st.auxiliary], chart.params))
            ok = list(w.coefficients) == want and inside
            node.add(verdict("auxiliary relation", ok, f"{st.auxiliary} = sum c_k g_k", [w]))
    if red.integrable is not None:
        fails = [f"[r{i + 1}, r{j + 1}]: {w}" for (i, j), w in sorted(red.integrable.items()) if not w]
        node.add(verdict("closedness", not fails, f"{len(red.integrable)} bracket pair(s)", fails))
    else:
        node.add(skipped("closedness", "upstairs structure is not integrable"))
    return node


def check_strata(scene: Scene, opts: Options) -> Node:
    node = Node("reduction")
    if not scene.strata:
        node.add(skipped("strata", "scene declares no strata"))
        return node
    if not scene.descending:
        node.add(skipped("strata", "scene lists no descending sections"))
        return node
    integrable = check_integrable(scene.dirac).ok
    for st in _strata(scene, opts):
        node.add(check_stratum(scene, st, opts, integrable))
    return node


def _ref(st, ref):
    return st.auxiliary if ref == "aux" else st.expected[ref - 1]


def check_brackets(scene: Scene, opts: Options) -> Node:
    node = Node("bracket identities")
    decls = [b for b in scene.brackets if opts.stratum is None or b.stratum == opts.stratum]
    if not decls:
        node.add(skipped("identities", "no bracket identities declared"))
        return node
    for b in decls:
        st = scene.stratum(b.stratum)
        i, j = b.pair
        br = courant_bracket(st.expected[i - 1], st.expected[j - 1])
        label = f"{b.stratum}: [g{i}, g{j}]"
        if b.equals is not None:
            rhs = combine(list(b.equals), list(st.expected))
            node.add(verdict(label, br == rhs, f"{br} == {rhs}"))
        else:
            against = [_ref(st, r) for r in b.against]
            w = membership_generic(br, Distribution.pontryagin(st.chart.params, against))
            names = ", ".join("aux" if r == "aux" else f"g{r}" for r in b.against)
            ok = bool(w) and list(w.coefficients) == list(b.witness)
            node.add(verdict(label, ok, f"witness against ({names}) = [{', '.join(map(str, b.witness))}]", [w]))
    return node


def _presented(pairs, point, chart):
    total = OneForm.zero(chart)
    for g, f in pairs:
        total = total + exterior_derivative_fn(f) * g
    return total.evaluate(point)


def check_relations(scene: Scene, opts: Options) -> Node:
    node = Node("relations")
    if not scene.relations:
        node.add(skipped("relations", "none declared"))
        return node
    for r in scene.relations:
        for p in r.points:
            lhs = _presented(r.lhs, p, scene.chart)
            rhs = _presented(r.rhs, p, scene.chart)
            ok = lhs == rhs and (r.value is None or tuple(lhs) == tuple(r.value) or p != r.points[0])
            node.add(verdict(f"{r.name} at {_pt(p)}", ok, f"lhs {_pt(lhs)}, rhs {_pt(rhs)}"))
    return node


def check_hamiltonians(scene: Scene, opts: Options) -> Node:
    node = Node("hamiltonians")
    if not scene.hamiltonians:
        node.add(skipped("hamiltonians", "none declared"))
        return node
    integrable = None
    for h in scene.hamiltonians:
        sub = node.add(Node(f"f = {h.f}"))
        sol = solve_admissible(h.f, scene.dirac)
        if not sol:
            sub.add(verdict("admissible", not h.admissible, str(sol)))
            continue
        sub.add(verdict("admissible", h.admissible, f"X_f = {sol.xf}"))
        if h.xf is not None:
            sub.add(verdict("X_f", sol.xf == h.xf, f"computed {sol.xf}; golden {h.xf}"))
        golden = [Section.tangent(x) for x in h.gauge]
        computed = list(sol.gauge.generators)
        ok = (all(module_contains(computed, golden, scene.chart)) if golden else True) and (
            all(module_contains(golden, computed, scene.chart)) if computed else True)
        ok = ok and bool(golden) == bool(computed)
        shown = "span{" + ", ".join(str(g.x) for g in computed) + "}" if computed else "0"
        sub.add(verdict("gauge", ok, shown))
        if h.stratum is not None and not scene.descending:
            sub.add(skipped(f"reduced on {h.stratum}", "scene declares no descending sections"))
        elif h.stratum is not None:
            st = scene.stratum(h.stratum)
            if integrable is None:
                integrable = check_integrable(scene.dirac).ok
            try:
                red = reduce_stratum(scene, st, opts, False)
                rh = reduce_hamiltonian(sol, scene.quotient, st.chart, red, opts.bound)
            except DiracRedError as exc:
                sub.add(_error_node(f"reduced on {st.name}", exc))
                continue
            ok = h.reduced is None or rh.section == h.reduced
            sub.add(verdict(f"reduced on {st.name}", ok, f"{rh.section} in the reduced structure", [rh.witness]))
    return node


def check_averaging(scene: Scene, opts: Options) -> Node:
    """Invariant objects average to themselves; coordinate fields match quadrature."""
    node = Node("averaging")
    a = scene.action
    if a.kind == "trivial":
        node.add(skipped("averaging", "trivial group"))
        return node
    for f in scene.fields:
        if f.role == "invariant":
            node.add(verdict(f"average {f.name}", average(f.field, a) == f.field, "invariant field is fixed"))
    for c in scene.descending:
        if not c.section.alpha.is_zero():
            node.add(verdict(f"average alpha of {c.name}", average(c.section.alpha, a) == c.section.alpha,
                             "invariant one-form is fixed"))
    pts = probe_points(scene, Options(samples=3, seed=opts.seed))[:5]
    worst = 0.0
    for coord in scene.chart.coords:
        x = VectorField.basis(scene.chart, coord)
        ex = average(x, a)
        for p in pts:
            num = average_quadrature(x, a, p)
            worst = max(worst, max(abs(u - float(v)) for u, v in zip(num, ex.evaluate(p))))
    node.add(verdict("quadrature agreement", worst < 1e-9,
                     f"coordinate fields at {len(pts)} point(s), max deviation {worst:.2e} (tolerance 1e-9)"))
    return node


CHECKS = {
    "dirac": check_dirac,
    "integrability": check_integrability,
    "symmetry": check_symmetry,
    "fields": check_fields,
    "descending": check_descending,
    "probe": check_probe,
    "reduction": check_strata,
    "brackets": check_brackets,
    "relations": check_relations,
    "hamiltonians": check_hamiltonians,
    "averaging": check_averaging,
}

FULL = ("dirac", "integrability", "symmetry", "fields", "descending", "probe",
        "reduction", "brackets", "relations", "hamiltonians")


def _guarded(name, fn, scene, opts):
    try:
        return fn(scene, opts)
    except DiracRedError as exc:
        return _error_node(name, exc)


def run_checks(scene: Scene, names, opts: Options | None = None) -> Node:
    """Run independent checks concurrently; children keep the requested order."""
    opts = opts or Options()
    root = Node(scene.name)
    jobs = [(n, CHECKS[n]) for n in names]
    if opts.workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=opts.workers) as pool:
            results = list(pool.map(lambda job: _guarded(job[0], job[1], scene, opts), jobs))
    else:
        results = [_guarded(n, fn, scene, opts) for n, fn in jobs]
    for r in results:
        root.add(r)
    return root


def validate(scene: Scene, opts: Options | None = None) -> Node:
    """Full certificate bundle for a scene as a pass/fail/skip/warn tree."""
    return run_checks(scene, FULL, opts)
