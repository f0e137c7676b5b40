"""Plain-text artifact formats, chosen by file suffix.

    .points    header "d B n", then one integer point per line
    .sums      "v_1 ... v_d r mu" per line, lexicographic in v
    .family    "v_1 ... v_d mu c_1 ... c_d c_0" per line
    .hist      "r_level <float>" then "k N_k" per line
    .forms     "c1 c2 c3 c4" per line
    .conics    "a1 a2 a3 a4 a5 a6" per line (exact rationals)
    .planes    "n_1 ... n_d offset" per line (exact rationals)
    .rpoints   one exact rational point per line
    .spheres   "center_1 ... center_d radius_squared" per line
    .witness   "t_max <int>" then the two hyperplanes as in .planes
    .cert      key=value certificate
    .exp       key=value exponent record
    .csv       "x,y" fit samples with a header line

Every format except .points, .cert and .exp opens with a "# kind key=value
..." comment line that records the row count, so truncated files are
reported at the first missing line. Writers are deterministic: exporting
an imported artifact reproduces the file byte for byte.
"""

import os
from dataclasses import fields
from fractions import Fraction

import numpy as np

from .conics import CommonPoints, Conic, QuadraticForm
from .energy import SumMultiplicityTable
from .errors import ArtifactParseError, DomainError
from .exact import fmt_rational, iroot, parse_rational
from .exponents import ExponentRecord
from .hyperplanes import DyadicHistogram, HyperplaneFamily, sum_hyperplane
from .lattice import PointSet
from .sparsify import SampleCertificate
from .surfaces import Hyperplane, Hypersphere


def _fmt_row(values):
    return " ".join(fmt_rational(v) for v in values)


class _Reader:
    """Line cursor that turns every problem into a numbered parse error."""

    def __init__(self, path):
        self.path = str(path)
        with open(path, encoding="ascii") as fh:
            self.lines = fh.read().split("\n")
        if self.lines and self.lines[-1] == "":
            self.lines.pop()
        self.pos = 0

    def error(self, msg, line=None):
        return ArtifactParseError(msg, self.path, line if line is not None else self.pos)

    def next(self, what="line"):
        if self.pos >= len(self.lines):
            raise self.error(f"unexpected end of file, expected {what}", self.pos + 1)
        self.pos += 1
        return self.lines[self.pos - 1]

    def tokens(self, what="row", sep=None):
        return self.next(what).split(sep)

    def ints(self, what="row", count=None):
        toks = self.tokens(what)
        if count is not None and len(toks) != count:
            raise self.error(f"expected {count} fields, got {len(toks)}")
        try:
            return [int(t) for t in toks]
        except ValueError as e:
            raise self.error(f"bad integer: {e}") from None

    def rationals(self, count=None):
        toks = self.tokens()
        if count is not None and len(toks) != count:
            raise self.error(f"expected {count} fields, got {len(toks)}")
        try:
            return [parse_rational(t) for t in toks]
        except (ValueError, ZeroDivisionError) as e:
            raise self.error(f"bad rational: {e}") from None

    def header(self, kind):
        line = self.next("header")
        parts = line.split()
        if len(parts) < 2 or parts[0] != "#" or parts[1] != kind:
            raise self.error(f"expected header '# {kind} ...'")
        meta = {}
        for p in parts[2:]:
            k, _, v = p.partition("=")
            meta[k] = v
        try:
            meta["count"] = int(meta["count"])
        except (KeyError, ValueError):
            raise self.error("header lacks an integer count=") from None
        return meta

    def finish(self):
        if self.pos != len(self.lines):
            raise self.error("trailing content", self.pos + 1)


def _write(path, text):
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(text)


# ---------------------------------------------------------------- point sets

def _write_points(P, path):
    lines = [f"{P.dimension} {P.truncation} {P.n_parameter}"]
    lines += [" ".join(str(c) for c in p) for p in P.points]
    _write(path, "\n".join(lines) + "\n")


def _read_points(path):
    r = _Reader(path)
    d, B, n = r.ints("header 'd B n'", 3)
    if d < 2 or B < 0 or n < 0:
        raise r.error("header values out of range")
    if (iroot(n, d - 1) if n > 0 else 0) != B:
        raise r.error(f"B = {B} does not match n = {n} for d = {d}")
    expected = (2 * B + 1) ** (d - 1)
    pts, seen = [], set()
    for _ in range(expected):
        p = tuple(r.ints("point", d))
        if any(abs(c) > B for c in p[:-1]) or p[-1] != sum(c * c for c in p[:-1]):
            raise r.error(f"point {p} is not on the truncated paraboloid")
        if p in seen:
            raise r.error(f"duplicate point {p}")
        seen.add(p)
        pts.append(p)
    r.finish()
    return PointSet(d, B, n, tuple(pts))


# ---------------------------------------------------------------- sum tables

def _write_sums(T, path):
    d = T.sums.shape[1] if len(T) else 0
    lines = [f"# sums d={d} points={T.point_count} count={len(T)}"]
    for v, (rv, mu) in T.items():
        lines.append(" ".join(str(c) for c in v) + f" {rv} {mu}")
    _write(path, "\n".join(lines) + "\n")


def _read_sums(path):
    r = _Reader(path)
    meta = r.header("sums")
    d, m = int(meta.get("d", 0)), int(meta.get("points", 0))
    rows = [r.ints("sum row", d + 2) for _ in range(meta["count"])]
    r.finish()
    a = np.array(rows, dtype=np.int64).reshape(-1, d + 2)
    return SumMultiplicityTable(a[:, :d].copy(), a[:, d].copy(), a[:, d + 1].copy(), m)


# ---------------------------------------------------------------- families

def _write_family(F, path):
    d = F.dimension
    lines = [f"# family d={d} count={len(F)}"]
    coeffs = F.coefficients()
    for v, mu, c in zip(F.sums, F.multiplicities, coeffs):
        lines.append(" ".join(str(int(x)) for x in v) + f" {int(mu)} "
                     + " ".join(str(int(x)) for x in c))
    _write(path, "\n".join(lines) + "\n")


def _read_family(path):
    r = _Reader(path)
    meta = r.header("family")
    d = int(meta.get("d", 0))
    sums, mus = [], []
    for _ in range(meta["count"]):
        row = r.ints("family row", 2 * d + 2)
        v, mu, c = row[:d], row[d], row[d + 1:]
        h = sum_hyperplane(v)
        if list(h.normal) + [h.offset] != c:
            raise r.error(f"coefficients {c} are not those of H_{tuple(v)}")
        if mu < 1:
            raise r.error("multiplicity must be positive")
        sums.append(v)
        mus.append(mu)
    r.finish()
    return HyperplaneFamily(np.array(sums, dtype=np.int64).reshape(-1, d),
                            np.array(mus, dtype=np.int64))


# ---------------------------------------------------------------- histogram

def _write_hist(H, path):
    n = H.n_parameter if H.n_parameter is not None else "none"
    lines = [f"# hist d={H.dimension} n={n} count={len(H.counts)}", f"r_level {H.r_level!r}"]
    lines += [f"{k} {H.counts[k]}" for k in sorted(H.counts)]
    _write(path, "\n".join(lines) + "\n")


def _read_hist(path):
    r = _Reader(path)
    meta = r.header("hist")
    toks = r.tokens("r_level line")
    if len(toks) != 2 or toks[0] != "r_level":
        raise r.error("expected 'r_level <value>'")
    try:
        rl = float(toks[1])
    except ValueError:
        raise r.error(f"bad r_level {toks[1]!r}") from None
    counts = {}
    for _ in range(meta["count"]):
        k, c = r.ints("'k N_k' row", 2)
        counts[k] = c
    r.finish()
    n = meta.get("n", "none")
    return DyadicHistogram(counts, rl, int(meta.get("d", 0)), None if n == "none" else int(n))


# ---------------------------------------------------------------- rational rows

def _rows_writer(kind, row_of):
    def write(items, path):
        items = list(items)
        lines = [f"# {kind} count={len(items)}"] + [_fmt_row(row_of(x)) for x in items]
        _write(path, "\n".join(lines) + "\n")
    return write


def _rows_reader(kind, build, width=None):
    def read(path):
        r = _Reader(path)
        meta = r.header(kind)
        out = []
        for _ in range(meta["count"]):
            vals = r.rationals(width)
            try:
                out.append(build(vals))
            except (DomainError, ValueError, TypeError) as e:
                raise r.error(str(e)) from None
        r.finish()
        return out
    return read


def _form(vals):
    if any(isinstance(v, Fraction) for v in vals):
        raise DomainError("form coefficients must be integers")
    return QuadraticForm(*vals)


def _write_witness(W, path):
    lines = [f"# witness count={0 if W.witness is None else 2}", f"t_max {W.t_max}"]
    if W.witness is not None:
        lines += [_fmt_row(h.normal + (h.offset,)) for h in W.witness]
    _write(path, "\n".join(lines) + "\n")


def _read_witness(path):
    r = _Reader(path)
    meta = r.header("witness")
    toks = r.tokens("t_max line")
    if len(toks) != 2 or toks[0] != "t_max":
        raise r.error("expected 't_max <int>'")
    try:
        t = int(toks[1])
    except ValueError:
        raise r.error("bad t_max") from None
    if meta["count"] not in (0, 2):
        raise r.error("a witness has zero or two hyperplanes", 1)
    hs = []
    for _ in range(meta["count"]):
        vals = r.rationals()
        try:
            hs.append(Hyperplane(tuple(vals[:-1]), vals[-1]))
        except DomainError as e:
            raise r.error(str(e)) from None
    r.finish()
    return CommonPoints(t, tuple(hs) if hs else None)


# ---------------------------------------------------------------- key=value

def _kv_value(v):
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    return "none" if v is None else str(v)


def _write_kv(obj, path):
    lines = [f"{f.name}={_kv_value(getattr(obj, f.name))}" for f in fields(obj)]
    _write(path, "\n".join(lines) + "\n")


def _parse_kv_value(raw, kind):
    if raw == "none":
        return None
    if kind == "bool":
        if raw not in ("True", "False"):
            raise ValueError(f"bad boolean {raw!r}")
        return raw == "True"
    if kind == "int":
        return int(raw)
    return Fraction(raw)


_CERT_KINDS = {"seed": "int", "draw_seed": "int", "retry": "int", "eps": "q", "t": "int",
               "n": "int", "p": "q", "family_size": "int", "retained": "int",
               "incidences_before": "int", "incidences_after": "int",
               "max_pair_codegree": "int", "forbidden_t": "int", "size_ok": "bool",
               "incidence_ok": "bool", "k2t_ok": "bool"}


def _kv_reader(cls, kinds):
    def read(path):
        r = _Reader(path)
        names = [f.name for f in fields(cls)]
        vals = {}
        for name in names:
            line = r.next(f"'{name}=' line")
            key, sep, raw = line.partition("=")
            if not sep or key != name:
                raise r.error(f"expected key {name!r}")
            try:
                vals[name] = _parse_kv_value(raw, kinds.get(name, "q"))
            except (ValueError, ZeroDivisionError) as e:
                raise r.error(str(e)) from None
        r.finish()
        return cls(**vals)
    return read


# ---------------------------------------------------------------- fit samples

def _write_samples(samples, path):
    lines = ["x,y"] + [f"{x!r},{y!r}" if isinstance(x, float) or isinstance(y, float)
                       else f"{x},{y}" for x, y in samples]
    _write(path, "\n".join(lines) + "\n")


def _read_samples(path):
    r = _Reader(path)
    if r.next("header") != "x,y":
        raise r.error("expected header 'x,y'")
    out = []
    while r.pos < len(r.lines):
        toks = r.tokens("sample", ",")
        if len(toks) != 2:
            raise r.error("expected 'x,y'")
        try:
            out.append(tuple(int(t) if t.lstrip("-").isdigit() else float(t) for t in toks))
        except ValueError as e:
            raise r.error(str(e)) from None
    return out


# ---------------------------------------------------------------- dispatch

_FORMATS = {
    ".points": (PointSet, _write_points, _read_points),
    ".sums": (SumMultiplicityTable, _write_sums, _read_sums),
    ".family": (HyperplaneFamily, _write_family, _read_family),
    ".hist": (DyadicHistogram, _write_hist, _read_hist),
    ".forms": (list, _rows_writer("forms", lambda F: (F.c1, F.c2, F.c3, F.c4)),
               _rows_reader("forms", _form, 4)),
    ".conics": (list, _rows_writer("conics", lambda c: c.coefficients),
                _rows_reader("conics", lambda v: Conic(*v), 6)),
    ".planes": (list, _rows_writer("planes", lambda h: h.normal + (h.offset,)),
                _rows_reader("planes", lambda v: Hyperplane(tuple(v[:-1]), v[-1]))),
    ".rpoints": (list, _rows_writer("rpoints", tuple), _rows_reader("rpoints", tuple)),
    ".spheres": (list, _rows_writer("spheres", lambda s: s.center + (s.radius_squared,)),
                 _rows_reader("spheres", lambda v: Hypersphere(tuple(v[:-1]), v[-1]))),
    ".witness": (CommonPoints, _write_witness, _read_witness),
    ".cert": (SampleCertificate, _write_kv, _kv_reader(SampleCertificate, _CERT_KINDS)),
    ".exp": (ExponentRecord, _write_kv, _kv_reader(ExponentRecord, {"d": "int"})),
    ".csv": (list, _write_samples, _read_samples),
}


def _format_for(path):
    suffix = os.path.splitext(str(path))[1]
    if suffix not in _FORMATS:
        raise DomainError(f"unknown artifact suffix {suffix!r}; known: {', '.join(_FORMATS)}")
    return _FORMATS[suffix]


def export_artifact(artifact, path):
    kind, write, _ = _format_for(path)
    if kind is list:
        artifact = list(artifact)
    elif not isinstance(artifact, kind):
        raise TypeError(f"{path} expects a {kind.__name__}, got {type(artifact).__name__}")
    write(artifact, path)
    return path


def import_artifact(path):
    return _format_for(path)[2](path)
