"""Command-line entry point: load a scene, run checks, emit a report."""
from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from .calculus import VectorField
from .errors import DenominatorNearZero, DiracRedError, SceneParseError, UnknownScene, ValidationError
from .exprcore import RatFn
from .report import Node, Report, passed, skipped, warned
from .scenes import Options, Scene, builtin, loads, run_checks, validate

COMMANDS = ("check", "reduce", "bracket", "average", "hamiltonian", "probe", "flow")

_SELECTION = {
    "reduce": ("reduction",),
    "bracket": ("integrability", "brackets"),
    "average": ("averaging",),
    "hamiltonian": ("hamiltonians",),
    "probe": ("probe",),
}

FLOW_TIME = 1.0
FLOW_STEPS = 1000
DRIFT_TOLERANCE = 1e-6
NEAR_ZERO = 1e-12


def load_scene(path) -> Scene:
    """Read a scene file, or ``builtin:NAME`` for a shipped scene."""
    text = str(path)
    if text.startswith("builtin:"):
        return builtin(text[len("builtin:"):])
    p = Path(path)
    if not p.is_file():
        raise FileNotFoundError(f"scene file {p} does not exist")
    return loads(p.read_text(encoding="utf-8"))


# -- numeric flow -----------------------------------------------------------------------------


def _compile_poly(p):
    terms = [(tuple(m), float(c)) for m, c in p.terms()]

    def ev(x):
        total = 0.0
        for m, c in terms:
            v = c
            for xi, e in zip(x, m):
                if e:
                    v *= xi ** e
            total += v
        return total

    return ev


def _compile(f: RatFn):
    num = _compile_poly(f.num)
    if f.is_poly:
        return num, None
    return num, _compile_poly(f.den)


def _field_function(x: VectorField):
    parts = [_compile(c) for c in x.components]

    def rhs(p):
        out = []
        for num, den in parts:
            if den is None:
                out.append(num(p))
                continue
            d = den(p)
            if abs(d) < NEAR_ZERO:
                raise ZeroDivisionError(d)
            out.append(num(p) / d)
        return out

    return rhs


def flow_numeric(x: VectorField, start, t: float, steps: int):
    """Classic fixed-step RK4 trajectory of ``x`` from ``start`` over [0, t].

    Raises DenominatorNearZero with the last safe point when a denominator of
    ``x`` comes within 1e-12 of zero along the path.
    """
    if steps < 1:
        raise ValueError("steps must be at least 1")
    f = _field_function(x)
    h = t / steps
    p = [float(v) for v in start]
    traj = [tuple(p)]
    for _ in range(steps):
        try:
            k1 = f(p)
            k2 = f([a + h / 2 * b for a, b in zip(p, k1)])
            k3 = f([a + h / 2 * b for a, b in zip(p, k2)])
            k4 = f([a + h * b for a, b in zip(p, k3)])
        except ZeroDivisionError:
            raise DenominatorNearZero(
                f"a denominator of {x} is within {NEAR_ZERO} of zero near {tuple(p)}",
                last_point=tuple(p),
                trajectory=traj,
            ) from None
        p = [a + h / 6 * (b1 + 2 * b2 + 2 * b3 + b4) for a, b1, b2, b3, b4 in zip(p, k1, k2, k3, k4)]
        traj.append(tuple(p))
    return traj


def max_drift(trajectory, polys) -> float:
    evs = [_compile(g) for g in polys]
    worst = 0.0
    for p in trajectory:
        for num, den in evs:
            v = num(p) if den is None else num(p) / den(p)
            worst = max(worst, abs(v))
    return worst


def flow_checks(scene: Scene, opts: Options) -> Node:
    """Advisory: flows of declared fields keep upstairs stratum points on their stratum."""
    node = Node("flow")
    fields = [f for f in scene.fields if not f.field.is_zero()]
    strata = [s for s in scene.strata if opts.stratum is None or s.name == opts.stratum]
    if not fields or not strata:
        node.add(skipped("flow", "scene declares no fields or strata"))
        return node
    for st in strata:
        polys = list(st.upstairs_locus)
        if not polys and st.chart.locus:
            from .exprcore import substitute

            bind = dict(zip(scene.target.coords, scene.invariants.fns))
            polys = [substitute(h, bind) for h in st.chart.locus]
        sub = node.add(Node(f"stratum {st.name}"))
        if not polys or not st.chart.upstairs:
            sub.add(skipped("drift", "open stratum or no upstairs samples"))
            continue
        for f in fields:
            for p in st.chart.upstairs:
                label = f"{f.name} from ({', '.join(str(v) for v in p)})"
                try:
                    traj = flow_numeric(f.field, p, FLOW_TIME, FLOW_STEPS)
                except DenominatorNearZero as exc:
                    sub.add(warned(label, str(exc)))
                    continue
                drift = max_drift(traj, polys)
                if math.isfinite(drift) and drift < DRIFT_TOLERANCE:
                    sub.add(passed(label, f"max drift {drift:.1e} over t in [0, {FLOW_TIME:g}], {FLOW_STEPS} RK4 steps"))
                else:
                    sub.add(warned(label, f"max drift {drift:.1e} exceeds {DRIFT_TOLERANCE:g} (advisory)"))
    return node


# -- dispatch ------------------------------------------------------------------------------------


def run(command: str, scene: Scene, flags: Options | None = None) -> Report:
    flags = flags or Options()
    if command not in COMMANDS:
        raise ValueError(f"unknown command {command!r}; expected one of {', '.join(COMMANDS)}")
    if flags.stratum is not None:
        scene.stratum(flags.stratum)  # raises KeyError with the known names
    if command == "check":
        root = validate(scene, flags)
    elif command == "flow":
        root = Node(scene.name)
        root.add(flow_checks(scene, flags))
    else:
        root = run_checks(scene, _SELECTION[command], flags)
    return Report(command, scene.name, root)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="diracred", description="Exact singular reduction checks on Dirac scenes.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("scene", help="path to a .scene file, or builtin:NAME")
    ap.add_argument("--json", action="store_true", help="emit a canonical JSON report")
    ap.add_argument("--stratum", metavar="NAME", help="restrict to one stratum")
    ap.add_argument("--bound", type=int, default=4, metavar="K", help="re-expression degree bound (default 4)")
    ap.add_argument("--seed", type=int, default=0, metavar="N", help="seed for random samples")
    ap.add_argument("--samples", type=int, default=20, metavar="K", help="number of seeded random samples")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        scene = load_scene(args.scene)
        flags = Options(bound=args.bound, seed=args.seed, samples=args.samples, stratum=args.stratum)
        report = run(args.command, scene, flags)
    except SceneParseError as exc:
        print(f"diracred: parse error: {exc}", file=sys.stderr)
        return 2
    except ValidationError as exc:
        print(f"diracred: invalid scene ({exc.invariant}): {exc}", file=sys.stderr)
        return 2
    except (UnknownScene, KeyError, FileNotFoundError, DiracRedError) as exc:
        print(f"diracred: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(report.to_json() if args.json else report.to_text())
    return report.exit_code


if __name__ == "__main__":
    raise SystemExit(main())
