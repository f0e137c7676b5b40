"""Command line entry point: ``paraboloid-incidences <verb> [options]``.

Every verb prints ``key=value`` lines on stdout. Inputs come either from
artifact files (--points, --family, ...) or are rebuilt from d and B (or n),
which may also be read from a --config file; command-line values win.
"""

import argparse
import os
import sys
from fractions import Fraction

from .artifacts import export_artifact, import_artifact
from .conics import max_common_points
from .energy import additive_energy, energy_brute_force, quadrature_energy_estimate
from .errors import ArtifactParseError, ConfigError, DomainError
from .exponents import fit_exponent
from .hyperplanes import build_family, dyadic_histogram, select_level
from .incidence import DEFAULT_PAIR_LIMIT, count_incidences
from .lattice import build_point_set, point_set_for_bound
from .pipeline import PipelineError, load_config, parse_config_text, run_pipeline
from .sparsify import sample_family
from .transforms import QuadraticFormShear, apply_inversion_config, dualize, shear_map


def _emit(**kv):
    for k, v in kv.items():
        if isinstance(v, Fraction):
            v = f"{v.numerator}/{v.denominator}" if v.denominator != 1 else v.numerator
        print(f"{k}={v}")


def _config_defaults(args):
    """Merge a --config file under the explicit command-line values."""
    raw = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            for line in fh:
                line = line.split("#", 1)[0].strip()
                if "=" in line:
                    k, v = line.split("=", 1)
                    raw[k.strip()] = v.strip()
    for key in ("d", "B", "n", "eps", "beta", "seed", "threads", "t"):
        v = getattr(args, key, None)
        if v is not None:
            raw[key] = str(v)
    if getattr(args, "threads", None) is None:
        args.threads = int(raw.get("threads", 1))
    return raw


def _points(args, raw):
    if getattr(args, "points", None):
        return import_artifact(args.points)
    if "d" not in raw or ("B" not in raw and "n" not in raw):
        raise ConfigError("give --points, or --d with --B or --n (or a --config providing them)")
    d = int(raw["d"])
    if "B" in raw:
        return point_set_for_bound(d, int(raw["B"]))
    return build_point_set(d, int(raw["n"]))


def _selected(args, raw, P):
    if getattr(args, "family", None):
        return import_artifact(args.family)
    beta = Fraction(raw.get("beta", "3"))
    return select_level(dyadic_histogram(build_family(P, workers=args.threads)), beta).family


def _family_n(args, raw):
    """n for a family read from disk: --n, else B^(d-1), else the --points header."""
    if "n" in raw:
        return int(raw["n"])
    if "B" in raw and "d" in raw:
        return int(raw["B"]) ** (int(raw["d"]) - 1)
    if args.points:
        return import_artifact(args.points).n_parameter
    return None


def _out(args, obj, default_name=None):
    if not args.out:
        return
    path = args.out
    if default_name and (os.path.isdir(path) or not os.path.splitext(path)[1]):
        os.makedirs(path, exist_ok=True)
        path = os.path.join(path, default_name)
    export_artifact(obj, path)
    _emit(wrote=path)


def _out_dir(args):
    if args.out:
        os.makedirs(args.out, exist_ok=True)
    return args.out


# ---------------------------------------------------------------- verbs

def cmd_build(args):
    raw = _config_defaults(args)
    P = _points(args, raw)
    _emit(d=P.dimension, B=P.truncation, n=P.n_parameter, points=len(P))
    _out(args, P, "P.points")


def cmd_energy(args):
    raw = _config_defaults(args)
    P = _points(args, raw)
    if args.method == "table":
        E = additive_energy(P, workers=args.threads).energy
    elif args.method == "brute":
        E = energy_brute_force(P).energy
    else:
        E = quadrature_energy_estimate(P, args.grid)
    _emit(method=args.method, points=len(P), n=P.n_parameter, energy=E)


def cmd_family(args):
    raw = _config_defaults(args)
    P = _points(args, raw)
    F = build_family(P, workers=args.threads)
    _emit(size=len(F), incidences=count_incidences(P, F, workers=args.threads))
    _out(args, F, "family.family")


def cmd_histogram(args):
    raw = _config_defaults(args)
    if args.family:
        F, n = import_artifact(args.family), _family_n(args, raw)
    else:
        P = _points(args, raw)
        F, n = build_family(P, workers=args.threads), P.n_parameter
    H = dyadic_histogram(F, n)
    _emit(r_level=H.r_level)
    for k in sorted(H.counts):
        print(f"N_{k}={H.counts[k]}")
    _out(args, H, "histogram.hist")


def cmd_select(args):
    raw = _config_defaults(args)
    beta = Fraction(raw.get("beta", "3"))
    if args.family:
        F, n = import_artifact(args.family), _family_n(args, raw)
    else:
        P = _points(args, raw)
        F, n = build_family(P, workers=args.threads), P.n_parameter
    sel = select_level(dyadic_histogram(F, n), beta)
    _emit(beta=beta, level=sel.level, r_level=sel.r_level, drift=sel.drift, size=len(sel.family))
    _out(args, sel.family, "selected.family")


def cmd_k2t(args):
    raw = _config_defaults(args)
    P = _points(args, raw)
    sel = _selected(args, raw, P)
    res = max_common_points(P, sel, pair_limit=args.pair_limit, workers=args.threads)
    _emit(hyperplanes=len(sel), t_max=res.t_max)
    if res.witness:
        for i, h in enumerate(res.witness):
            print(f"witness_{i}={h}")
    _out(args, res, "k2t.witness")


def cmd_dualize(args):
    raw = _config_defaults(args)
    P = _points(args, raw)
    sel = _selected(args, raw, P)
    pts, planes = dualize(P, sel)
    _emit(points=len(pts), hyperplanes=len(planes),
          incidences_before=count_incidences(P, sel, workers=args.threads),
          incidences_after=count_incidences(pts, planes, workers=args.threads))
    if _out_dir(args):
        for obj, name in ((pts, "dual.rpoints"), (planes, "dual.planes")):
            export_artifact(obj, os.path.join(args.out, name))
            _emit(wrote=os.path.join(args.out, name))


def _dual_inputs(args):
    if not (args.rpoints and args.planes):
        raise ConfigError("give --rpoints and --planes (as written by 'dualize')")
    return import_artifact(args.rpoints), import_artifact(args.planes)


def cmd_invert(args):
    _config_defaults(args)
    pts, planes = _dual_inputs(args)
    res = apply_inversion_config(pts, planes)
    _emit(translation=" ".join(str(x) for x in res.translation),
          incidences_before=count_incidences(pts, planes, workers=args.threads),
          incidences_after=count_incidences(res.points, res.spheres, workers=args.threads))
    if _out_dir(args):
        for obj, name in ((res.points, "inverted.rpoints"), (res.spheres, "inverted.spheres")):
            export_artifact(obj, os.path.join(args.out, name))
            _emit(wrote=os.path.join(args.out, name))


def cmd_shear(args):
    _config_defaults(args)
    pts, planes = _dual_inputs(args)
    f = QuadraticFormShear.sum_of_squares(len(pts[0]) if pts else planes[0].dimension)
    spts, graphs = shear_map(pts, planes, f)
    _emit(shear=f.tag,
          incidences_before=count_incidences(pts, planes, workers=args.threads),
          incidences_after=count_incidences(spts, graphs, workers=args.threads))
    _out(args, spts, "sheared.rpoints")


def cmd_sparsify(args):
    raw = _config_defaults(args)
    P = _points(args, raw)
    sel = _selected(args, raw, P)
    eps = Fraction(raw.get("eps", "3/10"))
    if "t" in raw:
        t = int(raw["t"])
    else:
        t = max_common_points(P, sel, pair_limit=args.pair_limit, workers=args.threads).t_max + 1
    seed = int(raw.get("seed", 0))
    cert, sub = sample_family(P, sel, eps, t, seed, max_retries=args.max_retries,
                              workers=args.threads)
    sys.stdout.write(cert.to_kv())
    if _out_dir(args):
        for obj, name in ((cert, "sample.cert"), (sub, "sampled.family")):
            export_artifact(obj, os.path.join(args.out, name))
            _emit(wrote=os.path.join(args.out, name))
    return 0 if cert.accepted else 3


def cmd_fit(args):
    raw = _config_defaults(args)
    if args.csv:
        samples = import_artifact(args.csv)
    else:
        if "d" not in raw:
            raise ConfigError("give --csv, or --d with --bounds")
        d = int(raw["d"])
        samples = []
        for B in args.bounds:
            P = point_set_for_bound(d, B)
            samples.append((P.n_parameter, additive_energy(P, workers=args.threads).energy))
    slope, intercept, resid = fit_exponent(samples)
    _emit(samples=len(samples), slope=slope, intercept=intercept, residual=resid)
    _out(args, samples, "fit.csv")


def cmd_pipeline(args):
    over = {"seed": args.seed, "out": args.out, "threads": args.threads, "d": args.d,
            "B": args.B, "n": args.n, "stages": args.stages}
    if args.config:
        cfg = load_config(args.config, over)
    else:
        cfg = parse_config_text("", over)
    report = run_pipeline(cfg)
    sys.stdout.write(report.to_text())


# ---------------------------------------------------------------- parser

def _bounds(text):
    return [int(x) for x in text.split(",") if x.strip()]


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value config file supplying defaults")
    common.add_argument("--seed", type=int)
    common.add_argument("--out", help="output file or directory")
    common.add_argument("--threads", type=int, help="parallelism degree (results do not depend on it)")

    size = argparse.ArgumentParser(add_help=False)
    size.add_argument("--d", type=int, help="ambient dimension")
    g = size.add_mutually_exclusive_group()
    g.add_argument("--B", type=int, help="truncation bound")
    g.add_argument("--n", type=int, help="size parameter, B = floor(n^(1/(d-1)))")
    size.add_argument("--points", help="PointSet artifact (.points) instead of --d/--B")

    fam = argparse.ArgumentParser(add_help=False)
    fam.add_argument("--family", help="family artifact (.family); selected family for k2t/dualize/sparsify")
    fam.add_argument("--beta", help="level-selection exponent beta > 2 (default 3)")

    dual = argparse.ArgumentParser(add_help=False)
    dual.add_argument("--rpoints", help="rational points (.rpoints)")
    dual.add_argument("--planes", help="hyperplanes (.planes)")

    p = argparse.ArgumentParser(prog="paraboloid-incidences",
                                description="Lattice paraboloid incidence constructions.")
    sub = p.add_subparsers(dest="verb", required=True)

    def add(name, fn, parents, help_):
        sp = sub.add_parser(name, parents=[common] + parents, help=help_)
        sp.set_defaults(fn=fn)
        return sp

    add("build", cmd_build, [size], "build the point set P")
    sp = add("energy", cmd_energy, [size], "additive energy of P")
    sp.add_argument("--method", choices=("table", "brute", "quadrature"), default="table")
    sp.add_argument("--grid", type=int, default=32, help="quadrature grid points per axis")
    add("family", cmd_family, [size], "sum-hyperplane family")
    add("histogram", cmd_histogram, [size, fam], "dyadic multiplicity histogram")
    add("select", cmd_select, [size, fam], "heavy level k' and its subfamily")
    sp = add("k2t", cmd_k2t, [size, fam], "max common points over hyperplane pairs")
    sp.add_argument("--pair-limit", type=int, default=DEFAULT_PAIR_LIMIT)
    add("dualize", cmd_dualize, [size, fam], "point-hyperplane duality")
    add("invert", cmd_invert, [dual], "translate and invert a dual configuration")
    add("shear", cmd_shear, [dual], "quadratic shear of a dual configuration")
    sp = add("sparsify", cmd_sparsify, [size, fam], "seeded thinning with certificate")
    sp.add_argument("--eps", help="epsilon (rational, default 3/10)")
    sp.add_argument("--t", type=int, help="K_{2,t} parameter (default t_max + 1)")
    sp.add_argument("--max-retries", type=int, default=50)
    sp.add_argument("--pair-limit", type=int, default=DEFAULT_PAIR_LIMIT)
    sp = add("fit", cmd_fit, [], "log-log slope of y against x")
    sp.add_argument("--csv", help="samples file with header x,y")
    sp.add_argument("--d", type=int)
    sp.add_argument("--bounds", type=_bounds, default=[1, 2, 3, 4], help="comma list of B")
    sp = add("pipeline", cmd_pipeline, [], "run a configured pipeline")
    sp.add_argument("--d", type=int)
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--B", type=int)
    g.add_argument("--n", type=int)
    sp.add_argument("--stages", help="comma list of stages (default: all)")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        rc = args.fn(args)
    except PipelineError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (ConfigError, DomainError, ArtifactParseError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    return rc or 0


if __name__ == "__main__":
    sys.exit(main())
