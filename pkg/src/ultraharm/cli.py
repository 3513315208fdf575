"""Command-line front end.

    ultraharm dual    --group heisenberg --p 3 --level 1 [--format json|csv|dot]
    ultraharm apply   INPUT --operator vt --alpha 2 [--out PATH]
    ultraharm verify  --suite plancherel --level 2 [--seed 0] [--out PATH]
    ultraharm report  --suite mu-alpha --alpha 0.5

Exit codes: 0 pass, 1 assertion failure, 2 usage or input error,
3 pole or coverage error.  Any command accepts ``--config FILE`` with plain
``key=value`` lines supplying defaults for the other flags.
"""

from __future__ import annotations

import csv
import io
import json
import math
import sys
from pathlib import Path

import click
import numpy as np

from . import analysis
from .dual import DualError, counting_report, dual, export_tree
from .fourier import CoverageError, FourierError, GridFunction, apply_multiplier
from .group import GroupDescriptor, GroupError
from .operators import OPERATOR_NAMES, OperatorError, PoleError, operator_symbol
from .padic import PadicError
from .suites import SUITES, VERIFY_SUITES, SuiteConfig, run_suite

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3

GROUP_KINDS = {
    "heisenberg": "heisenberg",
    "engel": "engel4",
    "engel4": "engel4",
    "b4": "engel4",
    "g52": "g52",
    "abelian": "abelian",
}

REPORTS = ("counting", "mu-alpha", "i-alpha-point", "mikhlin", "h-condition", "multiplier-norms")


class Failure(Exception):
    """A verification whose assertions did not hold; the report is still written."""


# ---------------------------------------------------------------------------
# deterministic serialization


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def _float_text(x: float) -> str:
    if math.isnan(x):
        return '"NaN"'
    if math.isinf(x):
        return '"Infinity"' if x > 0 else '"-Infinity"'
    return format(x, ".17g")


def dumps(obj, indent: int = 1, _level: int = 0) -> str:
    """JSON text with every float printed to 17 significant digits."""
    obj = _plain(obj) if _level == 0 else obj
    pad, inner = " " * (indent * _level), " " * (indent * (_level + 1))
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(k)}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list)) for v in obj):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in obj) + "]"
        return "[\n" + ",\n".join(inner + dumps(v, indent, _level + 1) for v in obj) + "\n" + pad + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, float):
        return _float_text(obj)
    return json.dumps(obj)


def rows_to_csv(rows: list[dict]) -> str:
    rows = [_plain(r) for r in rows]
    columns: list[str] = []
    for r in rows:
        columns += [k for k in r if k not in columns]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        cells = []
        for c in columns:
            v = r.get(c, "")
            if isinstance(v, float):
                v = format(v, ".17g")
            elif isinstance(v, (list, dict)):
                v = json.dumps(v, separators=(",", ":"))
            cells.append(v)
        w.writerow(cells)
    return buf.getvalue()


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        click.echo(text, nl=not text.endswith("\n"))


def _sibling(out: str, suffix: str) -> str:
    return str(Path(out).with_suffix(suffix))


# ---------------------------------------------------------------------------
# options


def _load_config(ctx: click.Context, _param, path):
    if path is None:
        return None
    defaults = {}
    try:
        for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise click.BadParameter(f"line {lineno}: expected key=value", param_hint="--config")
            key, value = (s.strip() for s in line.split("=", 1))
            defaults[key.replace("-", "_")] = value
    except OSError as exc:
        raise click.BadParameter(str(exc), param_hint="--config") from exc
    by_flag = {
        opt.lstrip("-").replace("-", "_"): param.name
        for param in ctx.command.params
        if isinstance(param, click.Option) and param.name != "config"
        for opt in param.opts
    }
    unknown = sorted(set(defaults) - set(by_flag))
    if unknown:
        raise click.BadParameter(f"unknown keys {', '.join(unknown)}", param_hint="--config")
    ctx.default_map = {**(ctx.default_map or {}), **{by_flag[k]: v for k, v in defaults.items()}}
    return path


def common_options(fn):
    opts = [
        click.option("--config", type=click.Path(dir_okay=False), callback=_load_config, is_eager=True,
                     expose_value=False, help="Plain key=value file with defaults for the other flags."),
        click.option("--group", "group_kind", default="heisenberg", show_default=True,
                     type=click.Choice(sorted(GROUP_KINDS)), help="Group family."),
        click.option("--p", "p", default=3, show_default=True, type=int, help="The prime."),
        click.option("--d", "d", default=1, show_default=True, type=int, help="Heisenberg/abelian dimension parameter."),
        click.option("--level", default=1, show_default=True, type=int, help="Truncation level N."),
        click.option("--alpha", default=None, type=float, help="Order or weight exponent."),
        click.option("--seed", default=0, show_default=True, type=int, help="Seed for random inputs."),
        click.option("--format", "fmt", default="json", show_default=True,
                     type=click.Choice(["json", "csv", "dot"]), help="Output format."),
        click.option("--out", default=None, type=click.Path(dir_okay=False), help="Output path (stdout if omitted)."),
    ]
    for opt in reversed(opts):
        fn = opt(fn)
    return fn


def _descriptor(group_kind: str, p: int, d: int, level: int) -> GroupDescriptor:
    if level < 1:
        raise click.BadParameter("the level must be >= 1", param_hint="--level")
    kind = GROUP_KINDS[group_kind]
    if kind in ("engel4", "g52") and d != 1:
        raise click.BadParameter(f"{group_kind} takes no --d", param_hint="--d")
    try:
        return GroupDescriptor(kind, p, d, level)
    except (GroupError, PadicError, ValueError) as exc:
        raise click.BadParameter(str(exc)) from exc


class _Runner(click.Group):
    """Maps library exceptions onto the exit-code contract."""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except Failure:
            ctx.exit(EXIT_FAIL)
        except (PoleError, CoverageError) as exc:
            click.echo(f"error: {exc}", err=True)
            ctx.exit(EXIT_NUMERIC)
        except (OperatorError, FourierError, DualError, GroupError, PadicError, analysis.AnalysisError, OSError,
                json.JSONDecodeError) as exc:
            click.echo(f"error: {exc}", err=True)
            ctx.exit(EXIT_USAGE)


@click.group(cls=_Runner)
@click.version_option(package_name="artifact")
def main():
    """Fourier analysis on truncated p-adic Lie groups."""


# ---------------------------------------------------------------------------
# commands


@main.command("dual")
@common_options
def cmd_dual(group_kind, p, d, level, alpha, seed, fmt, out):
    """List the irreps of the dual ball of radius p^level."""
    g = _descriptor(group_kind, p, d, level)
    if fmt == "dot":
        _emit(export_tree(g, level, "dot"), out)
        return
    rows = [
        {"id": pi.id, "params": [str(s) for s in pi.params], "dim": pi.dim, "norm": pi.dual_norm, "level": pi.level}
        for pi in dual(g, level)
    ]
    if fmt == "csv":
        _emit(rows_to_csv(rows), out)
        return
    counting = counting_report(g, level)
    doc = {"group": g.to_json(), "irreps": rows, "counting": counting, "tree": export_tree(g, level, "json")["edges"]}
    _emit(dumps(doc) + "\n", out)


@main.command("apply")
@click.argument("input_path", metavar="INPUT", type=click.Path(exists=True, dir_okay=False))
@click.option("--operator", required=True,
              help=f"One of {', '.join(OPERATOR_NAMES)} or radial:<profile.json>.")
@common_options
def cmd_apply(input_path, operator, group_kind, p, d, level, alpha, seed, fmt, out):
    """Apply an operator symbol to a grid function file."""
    f = GridFunction.from_json(json.loads(Path(input_path).read_text()))
    if fmt != "json":
        raise click.BadParameter("grid functions are written as JSON", param_hint="--format")
    ctx = click.get_current_context()
    explicit = {k for k in ("group_kind", "p", "d", "level")
                if ctx.get_parameter_source(k) not in (click.core.ParameterSource.DEFAULT, None)}
    if explicit:
        g = _descriptor(group_kind, p, d, level)
        if g != f.group:
            raise click.BadParameter(f"input is on {f.group.name} level {f.level}, flags ask for {g.name} level {g.level}")
    if alpha is None and not operator.startswith("radial:"):
        raise click.BadParameter(f"operator {operator} needs --alpha", param_hint="--alpha")
    sym = operator_symbol(operator, f.group, alpha if alpha is not None else 0.0, f.level)
    _emit(dumps(apply_multiplier(sym, f).to_json()) + "\n", out)


def _write_result(doc: dict, rows: list[dict], fmt: str, out: str | None) -> None:
    if fmt == "dot":
        raise click.BadParameter("reports are written as json or csv", param_hint="--format")
    main_text = dumps(doc) + "\n" if fmt == "json" else rows_to_csv(rows)
    _emit(main_text, out)
    if out:
        other = (".csv", rows_to_csv(rows)) if fmt == "json" else (".json", dumps(doc) + "\n")
        Path(_sibling(out, other[0])).write_text(other[1])


def _suite_config(g: GroupDescriptor, alpha, seed, options) -> SuiteConfig:
    opts = {}
    for item in options:
        if "=" not in item:
            raise click.BadParameter(f"expected key=value, got {item!r}", param_hint="--option")
        k, v = item.split("=", 1)
        opts[k.strip().replace("-", "_")] = v.strip()
    return SuiteConfig(g, seed=seed, alpha=alpha, options=opts)


@main.command("verify")
@click.option("--suite", "suite_name", required=True, type=click.Choice(sorted(set(VERIFY_SUITES) | set(SUITES))))
@click.option("--option", "options", multiple=True, help="Suite parameter as key=value (repeatable).")
@common_options
def cmd_verify(suite_name, options, group_kind, p, d, level, alpha, seed, fmt, out):
    """Run a verification suite; exit 0 iff all of its assertions hold."""
    g = _descriptor(group_kind, p, d, level)
    res = run_suite(suite_name, _suite_config(g, alpha, seed, options))
    doc = {"suite": res.name, "group": g.to_json(), "seed": seed, "alpha": alpha, "passed": res.passed,
           "summary": res.summary, "rows": res.rows}
    _write_result(doc, res.rows, fmt, out)
    click.echo(f"{res.name}: {'pass' if res.passed else 'FAIL'}", err=True)
    if not res.passed:
        raise Failure(res.name)


def _report(name: str, g: GroupDescriptor, alpha, seed, operator, options) -> tuple[dict, list[dict]]:
    cfg = _suite_config(g, alpha, seed, options)
    if name == "counting":
        rep = counting_report(g, g.level)
        rows = [{"kind": "ball", "k": k, "sum_d2": a, "expected": b} for k, a, b in rep["balls"]]
        rows += [{"kind": "sphere", "k": k, "sum_d2": a, "expected": b} for k, a, b in rep["spheres"]]
        return {"passed": rep["passed"], "irreps": rep["irreps"]}, rows
    if name == "mu-alpha":
        if alpha is None:
            raise click.BadParameter("mu-alpha needs --alpha", param_hint="--alpha")
        rep = analysis.mu_alpha_properties(g, alpha)
        rows = [{"k": k, "ball_ratio": r} for k, r in enumerate(rep.ball_ratios)]
        rows += [{"k": k, "shell_ratio": r} for k, r in enumerate(rep.shell_ratio)]
        return {"alpha": alpha, "ball_bounds": list(rep.ball_bounds), "doubling": rep.doubling}, rows
    if name == "i-alpha-point":
        from .group import GroupElement

        coords = tuple(int(c) for c in cfg.options.get("x", "1" + ",0" * (g.dim - 1)).split(","))
        rep = analysis.i_alpha(GroupElement(g, coords), 1.0 if alpha is None else alpha, cfg.opt("n_max", 3))
        row = {**vars(rep), "x": " ".join(str(c) for c in rep.x)}
        return vars(rep), [row]
    sym = operator_symbol(operator or "vt", g, 1.0 if alpha is None else alpha, g.level)
    if name == "mikhlin":
        rows, summary = [], {}
        for v in analysis.MIKHLIN_VARIANTS:
            rep = analysis.mikhlin_report(sym, 1.0 if alpha is None else alpha, v, cfg.opt("t", 1.5))
            summary[v] = {"constant": rep.constant, "witness": list(rep.witness or ())}
            rows += [{"variant": v, "eta": e, "xi": x, "value": val} for e, x, val in rep.rows]
        return summary, rows
    if name == "h-condition":
        rep = analysis.condition_h_report(sym, cfg.opt("t", 1.5))
        rows = [{"k": k, "l": l, "n": n, "measured": m, "bound": b} for k, l, n, m, b in rep.table]
        summary = {"B": rep.fitted_B, "eps": rep.fitted_eps, "passed": rep.passed,
                   "corollary": [list(c) for c in rep.corollary]}
        return summary, rows
    if name == "multiplier-norms":
        r = cfg.opt("r", 2.0)
        w = cfg.opt("weight", 0.0)
        samples = analysis.multiplier_norm_samples(sym, g, r, w, cfg.opt("count", 10), cfg.rng())
        return {"r": r, "weight": w, "max": max(samples)}, [{"index": i, "ratio": s} for i, s in enumerate(samples)]
    raise click.BadParameter(f"unknown report {name!r}", param_hint="--suite")


@main.command("report")
@click.option("--suite", "suite_name", required=True,
              type=click.Choice(sorted(set(REPORTS) | set(SUITES))),
              help="A report name or any verification suite (reported without affecting the exit code).")
@click.option("--operator", default=None, help="Operator for the symbol reports (default vt).")
@click.option("--option", "options", multiple=True, help="Report parameter as key=value (repeatable).")
@common_options
def cmd_report(suite_name, operator, options, group_kind, p, d, level, alpha, seed, fmt, out):
    """Emit a measurement report; exits 0 unless the input is invalid."""
    g = _descriptor(group_kind, p, d, level)
    if suite_name in SUITES:
        res = run_suite(suite_name, _suite_config(g, alpha, seed, options))
        summary, rows = {"passed": res.passed, **res.summary}, res.rows
    else:
        summary, rows = _report(suite_name, g, alpha, seed, operator, options)
    doc = {"report": suite_name, "group": g.to_json(), "seed": seed, "alpha": alpha, "summary": summary, "rows": rows}
    _write_result(doc, rows, fmt, out)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
