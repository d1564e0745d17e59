"""Command-line driver: ``phasefold opt | verify | bench``."""

from __future__ import annotations

import json
import logging
import sys
import time
from pathlib import Path

import click

from . import frontend, ir, simulator
from .analysis import MODES, AnalysisConfig
from .groebner import DEFAULT_PAIR_BUDGET
from .pathsum import DEFAULT_STEP_BUDGET
from .transform import TOFFOLI_MODES, OptimizeResult, optimize

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_MISMATCH = 3
DEFAULT_VERIFY_CAP = 8

log = logging.getLogger("phasefold")


def _fail(message: str, code: int) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _load(path: str) -> tuple[ir.Program, str]:
    try:
        fmt = frontend.detect_format(path)
        program = frontend.load(path, fmt)
    except (frontend.ParseError, ValueError, OSError) as exc:
        _fail(str(exc), EXIT_PARSE)
    problems = ir.validate(program)
    if problems:
        _fail("; ".join(problems), EXIT_PARSE)
    return program, fmt


def _config(mode: str, budget_groebner: int, budget_rewrite: int) -> AnalysisConfig:
    return AnalysisConfig(mode=mode, groebner_budget=budget_groebner, rewrite_budget=budget_rewrite)


def _emit(program: ir.Program, fmt: str) -> tuple[str, str]:
    """Source text in ``fmt``, falling back to QASM when ``.qc`` cannot express the result."""
    program = frontend.strip_locations(program)
    try:
        return frontend.emit(program, fmt), fmt
    except frontend.EmitError:
        return frontend.emit(program, "qasm"), "qasm"


def _check(result: OptimizeResult, unroll: int, cap: int) -> tuple[str, str | None]:
    """Returns (status, detail) with status in {"ok", "skipped", "mismatch"}."""
    n = len(result.original.qubits)
    if n > cap:
        return "skipped", f"{n} qubits exceed the verification cap of {cap}"
    try:
        diff = simulator.compare_programs(result.original, result.optimized, unroll=unroll, max_qubits=cap)
    except simulator.SimulationError as exc:
        return "skipped", str(exc)
    if diff is None:
        return "ok", None
    return "mismatch", f"paths differ on {diff[0]}"


def _stats_document(path: str, result: OptimizeResult, verification: tuple[str, str | None] | None) -> dict:
    doc = {
        "input": path,
        "mode": result.report.mode,
        "qubits": len(result.original.qubits),
        "before": result.before.to_json(),
        "after": result.after.to_json(),
        "rounds": len(result.reports),
        "invariants": [{"label": i.label, "relation": i.text} for i in result.invariants],
        "partitions": result.reports[0].to_json()["partitions"] if result.reports else [],
        "warnings": result.warnings,
        "degraded": result.degraded,
    }
    if verification is not None:
        doc["verification"] = {"status": verification[0], "detail": verification[1]}
    return doc


def _stats_text(doc: dict) -> str:
    b, a = doc["before"], doc["after"]
    lines = [
        f"{doc['input']}: mode {doc['mode']}, {doc['qubits']} qubits",
        f"  T-count  {b['t_total']} -> {a['t_total']}",
        f"  gates    {b['total']} -> {a['total']}",
    ]
    if "dynamic_t" in b:
        lines.append(f"  dynamic T-count  {b['dynamic_t']} -> {a.get('dynamic_t', '?')}")
    for inv in doc["invariants"]:
        lines.append(f"  invariant {inv['label']}: {inv['relation']}")
    for w in doc["warnings"]:
        lines.append(f"  warning: {w}")
    if "verification" in doc:
        v = doc["verification"]
        lines.append(f"  verification: {v['status']}" + (f" ({v['detail']})" if v["detail"] else ""))
    return "\n".join(lines)


# ---------------------------------------------------------------- commands


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Log analysis progress to stderr.")
def main(verbose: bool) -> None:
    """Relational phase folding for Clifford+T programs with classical control."""
    logging.basicConfig(level=logging.INFO if verbose else logging.ERROR, format="%(levelname)s %(name)s: %(message)s")


def _common(f):
    f = click.option("--mode", type=click.Choice(MODES), default="pol", show_default=True)(f)
    f = click.option("--budget-groebner", type=int, default=DEFAULT_PAIR_BUDGET, show_default=True,
                     help="Critical-pair budget per Gröbner completion.")(f)
    f = click.option("--budget-rewrite", type=int, default=DEFAULT_STEP_BUDGET, show_default=True,
                     help="Rewrite-step budget per path sum.")(f)
    f = click.option("--toffoli", type=click.Choice(TOFFOLI_MODES), default="hczh", show_default=True,
                     help="Lower Toffoli/CCZ to Clifford+T before folding, or keep them primitive.")(f)
    f = click.option("--unroll", type=click.IntRange(0, 3), default=2, show_default=True,
                     help="Loop unrolling depth for verification.")(f)
    return f


@main.command("opt")
@click.argument("source", type=click.Path(dir_okay=False))
@_common
@click.option("--verify", "verify_cap", type=int, is_flag=False, flag_value=DEFAULT_VERIFY_CAP, default=None,
              help="Check the result path by path (optionally with a qubit cap, default 8).")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Write the optimized program here.")
def cmd_opt(source, mode, budget_groebner, budget_rewrite, toffoli, unroll, verify_cap, fmt, out):
    """Optimize SOURCE and report gate statistics."""
    program, in_fmt = _load(source)
    result = optimize(program, _config(mode, budget_groebner, budget_rewrite), toffoli=toffoli)
    verification = _check(result, unroll, verify_cap) if verify_cap is not None else None
    doc = _stats_document(source, result, verification)
    target_fmt = in_fmt
    if out is not None:
        try:
            target_fmt = frontend.detect_format(out)
        except ValueError:
            pass
    text, used_fmt = _emit(result.optimized, target_fmt)
    if used_fmt != target_fmt:
        doc["warnings"].append(f"result written as {used_fmt}: the {target_fmt} format cannot express it")
    if out is not None:
        Path(out).write_text(text, encoding="utf-8")
    if fmt == "json":
        if out is None:
            doc["program"] = text
        click.echo(json.dumps(doc, indent=2, ensure_ascii=False))
    else:
        click.echo(_stats_text(doc))
        if out is None:
            click.echo(text, nl=False)
    for w in doc["warnings"]:
        log.warning(w)
    if verification is not None and verification[0] == "mismatch":
        click.echo(f"verification failed: {verification[1]}", err=True)
        sys.exit(EXIT_MISMATCH)


@main.command("verify")
@click.argument("original", type=click.Path(dir_okay=False))
@click.argument("optimized", type=click.Path(dir_okay=False), required=False)
@_common
@click.option("--cap", type=int, default=DEFAULT_VERIFY_CAP, show_default=True, help="Largest qubit count checked.")
def cmd_verify(original, optimized, mode, budget_groebner, budget_rewrite, toffoli, unroll, cap):
    """Check OPTIMIZED (or a fresh optimization of ORIGINAL) against ORIGINAL path by path."""
    before, _ = _load(original)
    if optimized is None:
        after = optimize(before, _config(mode, budget_groebner, budget_rewrite), toffoli=toffoli).optimized
    else:
        after, _ = _load(optimized)
    if len(before.qubits) > cap:
        click.echo(f"skipped: {len(before.qubits)} qubits exceed the verification cap of {cap}")
        return
    if before.qubits != after.qubits:
        click.echo("mismatch: the programs declare different qubits", err=True)
        sys.exit(EXIT_MISMATCH)
    try:
        diff = simulator.compare_programs(before, after, unroll=unroll, max_qubits=cap)
    except simulator.SimulationError as exc:
        click.echo(f"skipped: {exc}")
        return
    if diff is not None:
        click.echo(f"mismatch on path {diff[0]}", err=True)
        sys.exit(EXIT_MISMATCH)
    click.echo(f"ok: all paths agree up to global phase (unroll {unroll})")


@main.command("bench")
@click.argument("directory", type=click.Path(file_okay=False))
@click.option("--modes", default="aff,quad,pol", show_default=True, help="Comma-separated modes to run.")
@click.option("--manifest", type=click.Path(dir_okay=False), default=None,
              help="Expected counts (default: manifest.json in DIRECTORY or its parent).")
@click.option("--budget-groebner", type=int, default=DEFAULT_PAIR_BUDGET, show_default=True)
@click.option("--budget-rewrite", type=int, default=DEFAULT_STEP_BUDGET, show_default=True)
@click.option("--toffoli", type=click.Choice(TOFFOLI_MODES), default="hczh", show_default=True)
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Also write the JSON table here.")
def cmd_bench(directory, modes, manifest, budget_groebner, budget_rewrite, toffoli, fmt, out):
    """Run every circuit in DIRECTORY under each mode and tabulate T-counts."""
    modes = [m.strip() for m in modes.split(",") if m.strip()]
    for m in modes:
        if m not in MODES:
            _fail(f"unknown mode {m!r}", EXIT_PARSE)
    root = Path(directory)
    expected = _manifest_entries(root, manifest)
    files = sorted(p for p in root.iterdir() if p.suffix.lower() in (".qc", ".qasm", ".qasm3")) if root.is_dir() else []
    rows = []
    for path in files:
        rows.append(_bench_row(path, modes, expected.get(path.name), budget_groebner, budget_rewrite, toffoli))
    present = {p.name for p in files}
    for name, entry in sorted(expected.items()):
        if name not in present:
            rows.append({"file": name, "name": entry.get("name", name), "status": "absent"})
    if out is not None:
        Path(out).write_text(json.dumps(rows, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    if fmt == "json":
        click.echo(json.dumps(rows, indent=2, ensure_ascii=False))
    else:
        click.echo(_bench_table(rows, modes))


def _manifest_entries(root: Path, manifest: str | None) -> dict:
    candidates = [Path(manifest)] if manifest else [root / "manifest.json", root.parent / "manifest.json"]
    for c in candidates:
        if c.is_file():
            data = json.loads(c.read_text(encoding="utf-8"))
            section = data.get(root.name)
            if isinstance(section, dict):
                return section
            return {k: v for k, v in data.items() if isinstance(v, dict) and "t_before" in v}
    return {}


def _bench_row(path: Path, modes, entry, budget_groebner, budget_rewrite, toffoli) -> dict:
    row: dict = {"file": path.name, "name": (entry or {}).get("name", path.stem)}
    try:
        program = frontend.load(path)
    except (frontend.ParseError, ValueError) as exc:
        row.update(status="parse-error", detail=str(exc))
        return row
    row.update(status="ok", qubits=len(program.qubits), results={})
    for mode in modes:
        start = time.perf_counter()
        result = optimize(program, _config(mode, budget_groebner, budget_rewrite), toffoli=toffoli)
        cell = {"t_before": result.before.t_total, "t_after": result.after.t_total,
                "seconds": round(time.perf_counter() - start, 3)}
        if result.before.dynamic_t is not None:
            cell["dynamic_t_before"] = result.before.dynamic_t
            cell["dynamic_t_after"] = result.after.dynamic_t
        if entry is not None:
            want = entry.get("t_after", {}).get(mode)
            if want is not None:
                cell["expected"] = want
                cell["match"] = want == result.after.t_total and entry.get("t_before") == result.before.t_total
        row["results"][mode] = cell
    return row


def _bench_table(rows: list[dict], modes: list[str]) -> str:
    header = ["benchmark", "n", "T"] + [f"{m}" for m in modes] + [f"{m} s" for m in modes]
    body = []
    for r in rows:
        if r["status"] != "ok":
            body.append([r["name"], "-", r["status"]] + ["-"] * (2 * len(modes)))
            continue
        cells = [r["results"][m] for m in modes]
        t0 = str(cells[0]["t_before"]) if cells else "-"
        marks = []
        for c in cells:
            flag = "" if "match" not in c else (" ✓" if c["match"] else f" ✗(want {c['expected']})")
            marks.append(f"{c['t_after']}{flag}")
        body.append([r["name"], str(r["qubits"]), t0] + marks + [f"{c['seconds']:.2f}" for c in cells])
    widths = [max(len(str(x)) for x in col) for col in zip(header, *body)] if body else [len(h) for h in header]
    fmt_row = lambda cols: "  ".join(str(c).ljust(w) for c, w in zip(cols, widths))  # noqa: E731
    return "\n".join([fmt_row(header)] + [fmt_row(b) for b in body])


if __name__ == "__main__":
    main()
