"""Config-driven end-to-end run: P -> energy -> Pi -> Pi' -> t -> dual -> ...

Config files are flat ``key=value`` lines (``#`` starts a comment):

    d=4
    B=1                # or n=..., one of the two is required
    eps=3/10
    beta=3
    seed=20240601
    out=run-d4-b1
    threads=1
    stages=energy,family,histogram,select,k2t,dualize,invert,shear,sparsify,fit

Optional keys: ``t`` (sparsifier t, default t_max + 1 from the k2t stage),
``max_retries`` (50), ``pair_limit`` (10^8), ``fit_bounds`` (comma list of B
for the fit stage, default 1..B). Stage seeds are derived from ``seed`` by
name, so one seed fixes the whole run.
"""

import hashlib
import os
import time
from dataclasses import dataclass, field
from fractions import Fraction

from .artifacts import export_artifact
from .conics import max_common_points
from .energy import additive_energy, sum_multiplicities
from .errors import ConfigError, DomainError
from .exact import iroot
from .exponents import fit_exponent, theorem_exponents
from .hyperplanes import build_family, dyadic_histogram, select_level
from .incidence import DEFAULT_PAIR_LIMIT, count_incidences
from .lattice import build_point_set, point_set_for_bound
from .sparsify import derive_seed, sample_family
from .transforms import QuadraticFormShear, apply_inversion_config, dualize, shear_map

STAGES = ("energy", "family", "histogram", "select", "k2t", "dualize", "invert",
          "shear", "sparsify", "fit")

REQUIRES = {
    "energy": (),
    "family": (),
    "histogram": ("family",),
    "select": ("histogram",),
    "k2t": ("select",),
    "dualize": ("select",),
    "invert": ("dualize",),
    "shear": ("dualize",),
    "sparsify": ("select", "k2t"),
    "fit": (),
}

_KEYS = {"d", "n", "B", "eps", "beta", "seed", "out", "threads", "stages", "t",
         "max_retries", "pair_limit", "fit_bounds", "delta"}


class PipelineError(RuntimeError):
    def __init__(self, stage, cause):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass
class PipelineConfig:
    d: int
    B: int
    n: int
    eps: Fraction = Fraction(3, 10)
    beta: Fraction = Fraction(3)
    seed: int = 0
    out: str = "run"
    threads: int = 1
    stages: tuple = STAGES
    t: object = None
    max_retries: int = 50
    pair_limit: int = DEFAULT_PAIR_LIMIT
    fit_bounds: tuple = ()
    delta: object = None

    def __post_init__(self):
        validate_stages(self.stages)
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")
        if not self.fit_bounds:
            self.fit_bounds = tuple(range(1, max(self.B, 2) + 1))


def validate_stages(stages):
    seen = set()
    for s in stages:
        if s not in REQUIRES:
            raise ConfigError(f"unknown stage {s!r}")
        if s in seen:
            raise ConfigError(f"stage {s!r} listed twice")
        for need in REQUIRES[s]:
            if need not in seen:
                raise ConfigError(f"stage {s!r} requires {need!r} earlier in the stage list")
        seen.add(s)


def _int(key, raw):
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{key}: expected an integer, got {raw!r}") from None


def _frac(key, raw):
    try:
        return Fraction(raw)
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"{key}: expected a rational, got {raw!r}") from None


def parse_config_text(text, overrides=None):
    raw = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep:
            raise ConfigError(f"line {lineno}: expected key=value")
        if key not in _KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        raw[key] = value
    for k, v in (overrides or {}).items():
        if v is not None:
            raw[k] = str(v)
    return config_from_mapping(raw)


def config_from_mapping(raw):
    if "d" not in raw:
        raise ConfigError("d is required")
    d = _int("d", raw["d"])
    if d < 2:
        raise ConfigError("d must be >= 2")
    if "B" in raw:
        B = _int("B", raw["B"])
        if B < 0:
            raise ConfigError("B must be >= 0")
        n = B ** (d - 1)
    elif "n" in raw:
        n = _int("n", raw["n"])
        if n < 1:
            raise ConfigError("n must be >= 1")
        B = iroot(n, d - 1)
    else:
        raise ConfigError("one of B or n is required")
    stages = tuple(s.strip() for s in raw.get("stages", ",".join(STAGES)).split(",") if s.strip())
    kw = dict(d=d, B=B, n=n, stages=stages)
    for key in ("eps", "beta", "delta"):
        if key in raw:
            kw[key] = _frac(key, raw[key])
    for key in ("seed", "threads", "max_retries", "pair_limit", "t"):
        if key in raw:
            kw[key] = _int(key, raw[key])
    if "out" in raw:
        kw["out"] = raw["out"]
    if "fit_bounds" in raw:
        kw["fit_bounds"] = tuple(_int("fit_bounds", x) for x in raw["fit_bounds"].split(",") if x.strip())
    return PipelineConfig(**kw)


def load_config(path, overrides=None):
    with open(path, encoding="utf-8") as fh:
        return parse_config_text(fh.read(), overrides)


@dataclass
class RunReport:
    config: PipelineConfig
    stages: dict = field(default_factory=dict)  # name -> {metric: value}
    runtimes: dict = field(default_factory=dict)
    digests: dict = field(default_factory=dict)  # artifact file name -> sha256
    started: str = ""

    def to_kv(self):
        lines = [f"started={self.started}"]
        for stage, metrics in self.stages.items():
            for k, v in metrics.items():
                lines.append(f"{stage}.{k}={_fmt(v)}")
            lines.append(f"{stage}.runtime_s={self.runtimes[stage]:.6f}")
        for name in sorted(self.digests):
            lines.append(f"sha256.{name}={self.digests[name]}")
        return "\n".join(lines) + "\n"

    def to_text(self):
        c = self.config
        out = [f"run d={c.d} B={c.B} n={c.n} eps={_fmt(c.eps)} beta={_fmt(c.beta)} seed={c.seed}",
               f"started {self.started}", ""]
        for stage, metrics in self.stages.items():
            out.append(f"[{stage}] ({self.runtimes[stage]:.3f} s)")
            out.extend(f"  {k}: {_fmt(v)}" for k, v in metrics.items())
        out.append("")
        out.append("artifacts:")
        out.extend(f"  {name}  {self.digests[name]}" for name in sorted(self.digests))
        return "\n".join(out) + "\n"


def _fmt(v):
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}" if v.denominator != 1 else str(v.numerator)
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, tuple):
        return "(" + ",".join(_fmt(x) for x in v) + ")"
    return str(v)


def _sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


class _Run:
    def __init__(self, cfg, report):
        self.cfg = cfg
        self.report = report
        self.state = {}

    def save(self, obj, name):
        path = os.path.join(self.cfg.out, name)
        export_artifact(obj, path)
        self.report.digests[name] = _sha256(path)

    # each stage returns its metrics
    def build(self):
        c = self.cfg
        P = point_set_for_bound(c.d, c.B) if c.B ** (c.d - 1) == c.n else build_point_set(c.d, c.n)
        self.state["P"] = P
        self.save(P, "P.points")
        return {"d": c.d, "B": P.truncation, "n": P.n_parameter, "points": len(P)}

    def energy(self):
        P = self.state["P"]
        table = sum_multiplicities(P, workers=self.cfg.threads)
        self.save(table, "P.sums")
        E = additive_energy(P, workers=self.cfg.threads).energy
        return {"energy": E, "distinct_sums": len(table)}

    def family(self):
        P = self.state["P"]
        F = build_family(P, workers=self.cfg.threads)
        self.state["family"] = F
        self.save(F, "family.family")
        return {"size": len(F), "incidences": count_incidences(P, F, workers=self.cfg.threads)}

    def histogram(self):
        H = dyadic_histogram(self.state["family"])
        self.state["hist"] = H
        self.save(H, "histogram.hist")
        return {"r_level": H.r_level, "levels": tuple(H.counts[k] for k in sorted(H.counts))}

    def select(self):
        sel = select_level(self.state["hist"], self.cfg.beta)
        self.state["selected"] = sel.family
        self.save(sel.family, "selected.family")
        inc = count_incidences(self.state["P"], sel.family, workers=self.cfg.threads)
        return {"level": sel.level, "drift": sel.drift, "size": len(sel.family), "incidences": inc}

    def k2t(self):
        res = max_common_points(self.state["P"], self.state["selected"],
                                pair_limit=self.cfg.pair_limit, workers=self.cfg.threads)
        self.state["t_max"] = res.t_max
        self.save(res, "k2t.witness")
        return {"t_max": res.t_max}

    def dualize(self):
        pts, planes = dualize(self.state["P"], self.state["selected"])
        self.state["dual"] = (pts, planes)
        self.save(pts, "dual.rpoints")
        self.save(planes, "dual.planes")
        return {"points": len(pts), "hyperplanes": len(planes),
                "incidences": count_incidences(pts, planes, workers=self.cfg.threads)}

    def invert(self):
        res = apply_inversion_config(*self.state["dual"])
        self.save(res.points, "inverted.rpoints")
        self.save(res.spheres, "inverted.spheres")
        return {"translation": res.translation,
                "incidences": count_incidences(res.points, res.spheres, workers=self.cfg.threads)}

    def shear(self):
        pts, planes = self.state["dual"]
        f = QuadraticFormShear.sum_of_squares(self.cfg.d)
        spts, graphs = shear_map(pts, planes, f)
        self.save(spts, "sheared.rpoints")
        return {"shear": f.tag,
                "incidences": count_incidences(spts, graphs, workers=self.cfg.threads)}

    def sparsify(self):
        c = self.cfg
        t = c.t if c.t is not None else self.state["t_max"] + 1
        seed = derive_seed(c.seed, "sparsify")
        cert, sub = sample_family(self.state["P"], self.state["selected"], c.eps, t, seed,
                                  max_retries=c.max_retries, workers=c.threads)
        self.save(cert, "sample.cert")
        self.save(sub, "sampled.family")
        return {"t": t, "seed": seed, "retry": cert.retry, "retained": cert.retained,
                "incidences_after": cert.incidences_after,
                "max_pair_codegree": cert.max_pair_codegree, "accepted": cert.accepted}

    def fit(self):
        c = self.cfg
        samples = []
        for B in c.fit_bounds:
            P = point_set_for_bound(c.d, B)
            if P.n_parameter < 1:
                continue
            samples.append((P.n_parameter, additive_energy(P, workers=c.threads).energy))
        self.save(samples, "energy_vs_n.csv")
        metrics = {"samples": len(samples)}
        if len(samples) >= 2:
            slope, intercept, resid = fit_exponent(samples)
            metrics.update(slope=slope, intercept=intercept, residual=resid)
        metrics["predicted_slope"] = 3 - Fraction(2, c.d - 1)
        if c.d >= 4:
            delta = c.delta if c.delta is not None else Fraction(2 * c.d - 2, 2 * c.d - 1)
            rec = theorem_exponents(c.d, c.eps, delta, c.beta)
            self.save(rec, "exponents.exp")
            metrics["alpha"] = rec.alpha
        return metrics


def run_pipeline(cfg):
    """Run the configured stages in order, writing artifacts and the report under cfg.out."""
    if not isinstance(cfg, PipelineConfig):
        raise ConfigError("run_pipeline expects a PipelineConfig")
    validate_stages(cfg.stages)
    os.makedirs(cfg.out, exist_ok=True)
    report = RunReport(cfg, started=time.strftime("%Y-%m-%dT%H:%M:%S"))
    run = _Run(cfg, report)
    for stage in ("build",) + tuple(cfg.stages):
        t0 = time.perf_counter()
        try:
            metrics = getattr(run, stage)()
        except (DomainError, ValueError, ArithmeticError, MemoryError) as e:
            _write_report(cfg, report)
            raise PipelineError(stage, e) from e
        report.stages[stage] = metrics
        report.runtimes[stage] = time.perf_counter() - t0
    _write_report(cfg, report)
    return report


def _write_report(cfg, report):
    with open(os.path.join(cfg.out, "report.txt"), "w", encoding="utf-8") as fh:
        fh.write(report.to_text())
    with open(os.path.join(cfg.out, "report.kv"), "w", encoding="utf-8") as fh:
        fh.write(report.to_kv())
