"""Command-line front end.

Usage:
    jacobizeros eval --family constant:1,0 --x 0 --n 2
    jacobizeros zeros --family section4 --n 17
    jacobizeros count --family section4 --n 17 --lo -0.6 --hi -0.4
    jacobizeros certify --family section4 --x0 0 --support "[-5,-1],[1,5]" --n 1..100
    jacobizeros certify --family rank_one:3@constant:1,0 --x0 3.3333333333333335 --isolated --n 1..50
    jacobizeros gapdense --n-max 3
    jacobizeros gapdense --cloud 97
    jacobizeros quadrature --family section4 --N 20
    jacobizeros mcheck --family periodic2:3,1,0 --z 1j --N 1000

Exit codes: 0 success, 2 usage or parse error, 3 precondition violated,
4 a certificate failed (a theorem violation; should never happen).
"""

from __future__ import annotations

import csv
import functools
import io
import json
import math
import re
import sys
from concurrent.futures import ThreadPoolExecutor

import click

from . import gapdense, theorems, tridiag
from .coeffs import SupportModel, parse_family
from .polyeval import eval_p

__all__ = ["main"]

EXIT_PRECONDITION = 3
EXIT_VIOLATION = 4

GLOBAL_KEYS = {"format", "out", "tol", "threads"}


# --- formatting -------------------------------------------------------------

def fmt_number(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return format(v, ".17g")
    if v is None:
        return ""
    if isinstance(v, (list, tuple)):
        return " ".join(fmt_number(x) for x in v)
    return str(v)


_FLOAT_TOKEN = re.compile(r'"\\u0000F(.*?)\\u0000"')


def _json_ready(v):
    if isinstance(v, bool) or v is None or isinstance(v, (int, str)):
        return v
    if isinstance(v, float):
        if not math.isfinite(v):
            return None
        return "\0F" + format(v, ".17g") + "\0"
    if isinstance(v, dict):
        return {k: _json_ready(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_json_ready(x) for x in v]
    return str(v)


def dumps_json(obj) -> str:
    """JSON with every float written to 17 significant digits."""
    text = json.dumps(_json_ready(obj), indent=1)
    return _FLOAT_TOKEN.sub(lambda m: m.group(1), text)


def render(rows: list[dict], fields: list[str], fmt: str, human: list[str] | None = None) -> str:
    if fmt == "json":
        return dumps_json([{k: r[k] for k in fields} for r in rows]) + "\n"
    if fmt == "human" and human is not None:
        return "".join(line + "\n" for line in human)
    if fmt == "human":
        cells = [fields] + [[fmt_number(r[k]) for k in fields] for r in rows]
        widths = [max(len(c[i]) for c in cells) for i in range(len(fields))]
        return "".join(
            "  ".join(c.rjust(w) for c, w in zip(line, widths)).rstrip() + "\n" for line in cells
        )
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(fields)
    for r in rows:
        writer.writerow([fmt_number(r[k]) for k in fields])
    return buf.getvalue()


def emit(ctx: click.Context, rows, fields, human=None) -> None:
    opts = ctx.find_root().obj
    text = render(rows, fields, opts["format"], human)
    out = opts["out"]
    if out in (None, "-"):
        click.echo(text, nl=False)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def fail_precondition(msg: str):
    click.echo(f"Error: {msg}", err=True)
    sys.exit(EXIT_PRECONDITION)


# --- parameter types --------------------------------------------------------

class FamilyType(click.ParamType):
    name = "family"

    def convert(self, value, param, ctx):
        if not isinstance(value, str):
            if isinstance(value, dict):
                value = json.dumps(value)
            else:
                return value
        try:
            return parse_family(value)
        except (ValueError, IndexError) as exc:
            self.fail(str(exc), param, ctx)


class DegreeRange(click.ParamType):
    """``N`` or ``LO..HI`` (inclusive)."""

    name = "range"

    def convert(self, value, param, ctx):
        if isinstance(value, range):
            return value
        text = str(value)
        m = re.fullmatch(r"\s*(\d+)\s*(?:\.\.\s*(\d+)\s*)?", text)
        if not m:
            self.fail(f"expected N or LO..HI, got {text!r}", param, ctx)
        lo = int(m.group(1))
        hi = int(m.group(2)) if m.group(2) is not None else lo
        if hi < lo:
            self.fail(f"empty range {text!r}", param, ctx)
        return range(lo, hi + 1)


class SupportType(click.ParamType):
    """``[lo,hi],[lo,hi],p`` -- intervals and isolated points."""

    name = "support"

    def convert(self, value, param, ctx):
        if isinstance(value, SupportModel):
            return value
        try:
            items = json.loads(f"[{value}]")
            ivs = [tuple(map(float, it)) for it in items if isinstance(it, list)]
            pts = [float(it) for it in items if not isinstance(it, list)]
            if any(len(iv) != 2 for iv in ivs):
                raise ValueError("intervals need two endpoints")
            return SupportModel(tuple(sorted(ivs)), tuple(pts))
        except (ValueError, TypeError) as exc:
            self.fail(f"bad support spec {value!r}: {exc}", param, ctx)


class ComplexType(click.ParamType):
    name = "complex"

    def convert(self, value, param, ctx):
        try:
            return complex(str(value).replace(" ", ""))
        except ValueError:
            self.fail(f"not a complex number: {value!r}", param, ctx)


FAMILY = FamilyType()
family_option = click.option(
    "--family", type=FAMILY, required=True,
    help="constant:A,B | periodic2:A1,A2,B | section4 | rank_one:B1@<family> | "
    "strip:<family> | explicit:a..;b.. | JSON object",
)


def global_flags(f):
    """Accept the global flags after the subcommand name as well."""

    @functools.wraps(f)
    def wrapper(*args, g_format=None, g_out=None, g_tol=None, g_threads=None, **kwargs):
        opts = click.get_current_context().find_root().obj
        for key, val in (("format", g_format), ("out", g_out), ("tol", g_tol), ("threads", g_threads)):
            if val is not None:
                opts[key] = val
        if opts["tol"] is not None and not opts["tol"] > 0:
            raise click.UsageError("--tol must be positive")
        return f(*args, **kwargs)

    for decl in reversed([
        click.option("--format", "g_format", type=click.Choice(["csv", "json", "human"]),
                     default=None, help="Output format (overrides the global flag)."),
        click.option("--out", "g_out", default=None, help="Output file."),
        click.option("--tol", "g_tol", type=float, default=None, help="Bisection width."),
        click.option("--threads", "g_threads", type=click.IntRange(min=1), default=None,
                     help="Worker threads."),
    ]):
        wrapper = decl(wrapper)
    return wrapper


# --- config -----------------------------------------------------------------

def load_config(ctx: click.Context, path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise click.UsageError(f"cannot read config {path}: {exc}")
    if not isinstance(cfg, dict):
        raise click.UsageError("config must be a JSON object")
    group = ctx.command
    for key, val in cfg.items():
        if key in GLOBAL_KEYS:
            continue
        sub = group.commands.get(key)
        if sub is None:
            raise click.UsageError(f"unknown config field {key!r}")
        if not isinstance(val, dict):
            raise click.UsageError(f"config section {key!r} must be an object")
        names = {p.name for p in sub.params}
        bad = set(val) - names
        if bad:
            raise click.UsageError(f"unknown fields in config section {key!r}: {sorted(bad)}")
    return cfg


# --- commands ---------------------------------------------------------------

@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.option("--format", "fmt", type=click.Choice(["csv", "json", "human"]), default="csv",
              show_default=True, help="Output format.")
@click.option("--out", default="-", show_default=True, help="Output file ('-' for stdout).")
@click.option("--tol", type=float, default=None,
              help="Bisection width (default 1e-12 * max(1, spectral radius bound)).")
@click.option("--threads", type=click.IntRange(min=1), default=1, show_default=True,
              help="Worker threads for certificate sweeps.")
@click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None,
              help="JSON file with global keys and per-command sections.")
@click.pass_context
def main(ctx, fmt, out, tol, threads, config_path):
    """Zeros of orthogonal polynomials from Jacobi recurrence coefficients."""
    opts = {"format": fmt, "out": out, "tol": tol, "threads": threads}
    if config_path:
        cfg = load_config(ctx, config_path)
        for key in GLOBAL_KEYS & set(cfg):
            name = "fmt" if key == "format" else key
            if ctx.get_parameter_source(name) == click.core.ParameterSource.DEFAULT:
                opts[key] = cfg[key]
        if opts["format"] not in ("csv", "json", "human"):
            raise click.UsageError(f"bad format {opts['format']!r} in config")
        ctx.default_map = {k: v for k, v in cfg.items() if k not in GLOBAL_KEYS}
    if opts["tol"] is not None and not opts["tol"] > 0:
        raise click.UsageError("--tol must be positive")
    ctx.obj = opts


@main.command("eval")
@family_option
@click.option("--x", "x", type=float, required=True, help="Evaluation point.")
@click.option("--n", type=click.IntRange(min=0), required=True, help="Highest degree.")
@global_flags
@click.pass_context
def cmd_eval(ctx, family, x, n):
    """Values p_0(x) .. p_n(x) as sign and log-magnitude."""
    rows = []
    for j, v in enumerate(eval_p(family, x, n)):
        plain = v.value
        rows.append({
            "j": j, "sign": v.sign, "log_abs": v.log_mag,
            "value": plain if math.isfinite(plain) else None,
        })
    emit(ctx, rows, ["j", "sign", "log_abs", "value"])


@main.command("zeros")
@family_option
@click.option("--n", type=click.IntRange(min=1), required=True, help="Degree.")
@global_flags
@click.pass_context
def cmd_zeros(ctx, family, n):
    """Zeros of p_n (eigenvalues of the n x n truncation)."""
    zs = tridiag.zeros(family, n, ctx.find_root().obj["tol"])
    emit(ctx, zs.rows(), ["index", "zero", "bracket_width"])


@main.command("count")
@family_option
@click.option("--n", type=click.IntRange(min=0), required=True)
@click.option("--lo", type=float, default=None)
@click.option("--hi", type=float, default=None)
@click.option("--x0", type=float, default=None)
@click.option("--delta", type=float, default=None)
@global_flags
@click.pass_context
def cmd_count(ctx, family, n, lo, hi, x0, delta):
    """Number of zeros of p_n in an open interval (LO, HI) or (X0-DELTA, X0+DELTA)."""
    if x0 is not None or delta is not None:
        if x0 is None or delta is None or lo is not None or hi is not None:
            raise click.UsageError("give either --lo/--hi or --x0/--delta")
        lo, hi = x0 - delta, x0 + delta
    if lo is None or hi is None:
        raise click.UsageError("interval missing: give --lo/--hi or --x0/--delta")
    if not lo < hi:
        raise click.UsageError("need lo < hi")
    c = tridiag.count_zeros_in(family, n, lo, hi)
    emit(ctx, [{"n": n, "lo": lo, "hi": hi, "count": c}], ["n", "lo", "hi", "count"])


GAP_FIELDS = ["x0", "d", "n", "delta_n", "counts", "zero_free_degrees", "verified"]
ISO_FIELDS = ["x0", "d0", "n", "delta_n", "counts", "low_zero_degree", "zero_count",
              "q_counts", "verified", "status"]


@main.command("certify")
@family_option
@click.option("--x0", type=float, required=True)
@click.option("--n", "degrees", type=DegreeRange(), default="1..100", show_default=True,
              help="Degree N or range LO..HI.")
@click.option("--support", type=SupportType(), default=None,
              help='Support model, e.g. "[-5,-1],[1,5]"; required unless --isolated.')
@click.option("--isolated", is_flag=True, help="Isolated-point certificate (x0 in the support).")
@click.option("--nu-n", "nu_n", type=click.IntRange(min=2), default=theorems.NU_N, show_default=True,
              help="Truncation size for support estimates.")
@click.option("--eps", type=float, default=theorems.NU_EPS, show_default=True,
              help="Fattening radius for support estimates.")
@global_flags
@click.pass_context
def cmd_certify(ctx, family, x0, degrees, support, isolated, nu_n, eps):
    """Zero-exclusion certificates for each degree in the range."""
    threads = ctx.find_root().obj["threads"]
    if isolated == (support is not None):
        raise click.UsageError("give exactly one of --support or --isolated")
    if isolated:
        try:
            theorems.check_isolated_point(family, x0, nu_n, eps)
        except theorems.PreconditionError as exc:
            fail_precondition(str(exc))
        nu = theorems.estimate_nu_support(family, nu_n, eps)

        def one(n):
            return theorems.certify_theorem2(family, x0, n, nu_n, eps, nu_support=nu,
                                             check_isolated=False)
        fields = ISO_FIELDS
    else:
        if support.dist(x0) == 0:
            fail_precondition(f"x0 = {x0} lies inside the support {support}")

        def one(n):
            return theorems.certify_theorem1(family, support, x0, n)
        fields = GAP_FIELDS
    with ThreadPoolExecutor(max_workers=threads) as pool:
        certs = list(pool.map(one, degrees))
    emit(ctx, [c.to_dict() for c in certs], fields, [c.verdict() for c in certs])
    if any(getattr(c, "status", "") != "inconclusive" and not c.verified for c in certs):
        click.echo("Error: certificate failed -- theorem violation detected", err=True)
        sys.exit(EXIT_VIOLATION)


@main.command("gapdense")
@click.option("--n-max", "n_max", type=click.IntRange(min=1), default=5, show_default=True)
@click.option("--cloud", "cloud", type=click.IntRange(min=1), default=None,
              help="Instead list gap zeros of p_1 .. p_J in (-1, 1).")
@global_flags
@click.pass_context
def cmd_gapdense(ctx, n_max, cloud):
    """Dense-zeros-in-the-gap experiment records, or the gap zero cloud."""
    tol = ctx.find_root().obj["tol"] or gapdense.EXPERIMENT_TOL
    if cloud is not None:
        pts = gapdense.gap_zero_cloud(cloud, tol=tol)
        emit(ctx, [{"j": j, "zero": z} for j, z in pts], ["j", "zero"])
        return
    recs = gapdense.run_gap_experiment(n_max, tol)
    emit(ctx, [r.row() for r in recs], gapdense.FIELDS)
    if not all(r.passed for r in recs):
        click.echo("Error: a record exceeded its bound", err=True)
        sys.exit(EXIT_VIOLATION)


@main.command("quadrature")
@family_option
@click.option("--N", "N", type=click.IntRange(min=1), required=True, help="Number of nodes.")
@global_flags
@click.pass_context
def cmd_quadrature(ctx, family, N):
    """Gauss nodes and weights from the N x N truncation."""
    tol = ctx.find_root().obj["tol"] or tridiag.QUADRATURE_TOL
    nodes, weights = tridiag.gauss_quadrature(family, N, tol)
    rows = [{"index": i + 1, "node": float(x), "weight": float(w)}
            for i, (x, w) in enumerate(zip(nodes, weights))]
    emit(ctx, rows, ["index", "node", "weight"])


@main.command("mcheck")
@family_option
@click.option("--z", type=ComplexType(), default="2j", show_default=True)
@click.option("--N", "N", type=click.IntRange(min=1), default=500, show_default=True)
@global_flags
@click.pass_context
def cmd_mcheck(ctx, family, z, N):
    """Stieltjes transform and the second-kind consistency residual at z."""
    if z.imag == 0:
        raise click.UsageError("--z must be off the real axis")
    m = theorems.m_function(family, z, N)
    res = theorems.check_eq32(family, z, N)
    emit(ctx, [{"z_re": z.real, "z_im": z.imag, "N": N, "m_re": m.real, "m_im": m.imag,
                "residual": res}], ["z_re", "z_im", "N", "m_re", "m_im", "residual"])


if __name__ == "__main__":
    main()
