"""Command-line interface.

Exit codes: 0 satisfied / passed / done, 1 not satisfied / failed,
2 unreadable or ill-formed input.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import generate
from .generate import MutationKind, ModelGenParams, ViewDeriveParams
from .textual import (
    ParseError,
    export_json,
    parse_model,
    parse_view,
    print_model,
    print_view,
    print_witness,
)
from .verify import Mode, SpecEntry, Specification, verify, verify_specification

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2

HEADINGS = {
    "missing_component": "Missing Component",
    "hierarchy_mismatch": "Hierarchy Mismatch",
    "interface_mismatch": "Interface Mismatch",
    "missing_connection": "Missing Connection",
}


class InputError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise InputError(f"{path}: cannot read: {e}") from None


def _load(path: str, parse):
    try:
        return parse(_read(path), file=path)
    except ParseError as e:
        raise InputError(str(e)) from None


def _fail_input(e: Exception):
    click.echo(str(e), err=True)
    sys.exit(EXIT_INPUT)


@click.group()
@click.version_option(package_name="artifact", prog_name="ccview")
def main():
    """Verify component-and-connector models against views."""


@main.command("verify")
@click.argument("model_path", metavar="MODEL")
@click.argument("view_path", metavar="VIEW")
@click.option("--out", "out_dir", envvar="CCVIEW_OUT", default=".", show_default=True,
              help="Directory for witness files (env CCVIEW_OUT).")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text",
              show_default=True)
@click.option("--no-witness-files", is_flag=True, help="Do not write .ccw files.")
def cmd_verify(model_path, view_path, out_dir, fmt, no_witness_files):
    """Check whether MODEL satisfies VIEW and write witnesses."""
    try:
        m = _load(model_path, parse_model)
        v = _load(view_path, parse_view)
    except InputError as e:
        _fail_input(e)

    result = verify(m, v)
    files = []
    if not no_witness_files:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for i, w in enumerate(result.witnesses):
            f = out / f"{v.name}_{w.kind.value}_{i}.ccw"
            f.write_text(print_witness(w), encoding="utf-8")
            files.append(f)

    if fmt == "json":
        click.echo(export_json(result))
    else:
        if result.satisfied:
            click.echo(f"{m.name} satisfies {v.name}")
            for w in result.witnesses:
                click.echo(f"  {w.text}")
        else:
            click.echo(f"{m.name} does not satisfy {v.name}: "
                       f"{len(result.witnesses)} witnesses for non-satisfaction")
            for kind, heading in HEADINGS.items():
                group = [w for w in result.witnesses if w.kind.value == kind]
                if group:
                    click.echo(f"{heading} ({len(group)})")
                    for w in group:
                        click.echo(f"  {w.text}")
        for f in files:
            click.echo(f"wrote {f}")
    sys.exit(EXIT_OK if result.satisfied else EXIT_FAIL)


def parse_spec_file(path: str) -> Specification:
    """Spec files hold one ``<mode> <view path>`` entry per line.

    Modes are ``mandatory``, ``negative`` and ``alt:<group>``. Blank lines
    and lines starting with ``#`` or ``//`` are ignored. View paths are
    relative to the spec file.
    """
    base = Path(path).parent
    views: dict[Path, object] = {}
    entries = []
    for lineno, raw in enumerate(_read(path).splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith(("#", "//")):
            continue
        parts = line.split(None, 1)
        if len(parts) != 2:
            raise InputError(f"{path}:{lineno}: expected '<mode> <view path>'")
        mode_s, view_s = parts
        group = None
        if mode_s.startswith("alt:"):
            mode, group = Mode.ALTERNATIVE, mode_s[4:]
            if not group:
                raise InputError(f"{path}:{lineno}: empty alternative group")
        elif mode_s in ("mandatory", "negative"):
            mode = Mode(mode_s)
        else:
            raise InputError(f"{path}:{lineno}: unknown mode {mode_s!r}")
        vpath = (base / view_s).resolve()
        if vpath not in views:
            views[vpath] = _load(str(vpath), parse_view)
        entries.append(SpecEntry(views[vpath], mode, group))
    return Specification(entries)


@main.command("batch")
@click.argument("model_path", metavar="MODEL")
@click.argument("spec_path", metavar="SPEC")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text",
              show_default=True)
def cmd_batch(model_path, spec_path, fmt):
    """Check MODEL against every view listed in SPEC."""
    try:
        m = _load(model_path, parse_model)
        spec = parse_spec_file(spec_path)
    except InputError as e:
        _fail_input(e)

    report = verify_specification(m, spec)
    if fmt == "json":
        click.echo(json.dumps({
            "model": m.name,
            "passed": report.passed,
            "executions": report.executions,
            "entries": [{"view": e.view.name, "mode": e.label, "satisfied": r.satisfied,
                         "passed": ok} for e, r, ok in report.rows],
            "groups": report.groups,
        }, indent=2))
    else:
        width = max((len(e.view.name) for e, _, _ in report.rows), default=4)
        for e, r, ok in report.rows:
            verdict = "satisfied" if r.satisfied else "not satisfied"
            click.echo(f"{e.view.name:<{width}}  {e.label:<12} {verdict:<14} "
                       f"{'PASS' if ok else 'FAIL'}")
        for g, ok in report.groups.items():
            click.echo(f"group {g}: {'PASS' if ok else 'FAIL'}")
        click.echo(f"overall: {'PASS' if report.passed else 'FAIL'} "
                   f"({report.executions} verifications)")
    sys.exit(EXIT_OK if report.passed else EXIT_FAIL)


def _emit(text: str, output):
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        click.echo(text, nl=False)


@main.command("gen-model")
@click.option("--components", type=int, required=True)
@click.option("--max-subs", type=int, default=8, show_default=True)
@click.option("--port-types", type=int, default=8, show_default=True)
@click.option("--max-ports", type=int, default=None,
              help="Defaults to 8 x components.")
@click.option("--max-connectors", type=int, default=None,
              help="Defaults to half of --max-ports.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--name", default=None)
@click.option("-o", "--output", type=click.Path(dir_okay=False), default=None)
def cmd_gen_model(components, max_subs, port_types, max_ports, max_connectors, seed, name,
                  output):
    """Write a random model (.ccm)."""
    if max_ports is None:
        max_ports = 8 * max(components, 0)
    if max_connectors is None:
        max_connectors = max_ports // 2
    try:
        m = generate.gen_model(ModelGenParams(components, max_subs, port_types, max_ports,
                                              max_connectors, seed), name=name)
    except ValueError as e:
        _fail_input(f"infeasible parameters: {e}")
    _emit(print_model(m), output)


def _mutation_list(value: str) -> tuple[MutationKind, ...]:
    if not value:
        return ()
    try:
        return tuple(MutationKind(s.strip()) for s in value.split(",") if s.strip())
    except ValueError as e:
        choices = ", ".join(k.value for k in MutationKind)
        raise click.BadParameter(f"{e}; choose from {choices}") from None


@main.command("derive-view")
@click.argument("model_path", metavar="MODEL")
@click.option("--keep-components", type=int, required=True)
@click.option("--max-keep-ports", type=int, default=None, help="Defaults to 2 x kept components.")
@click.option("--max-keep-connectors", type=int, default=None,
              help="Defaults to 2 x kept components.")
@click.option("--mutations", default="", help="Comma-separated mutation kinds.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--name", default=None)
@click.option("-o", "--output", type=click.Path(dir_okay=False), default=None)
def cmd_derive_view(model_path, keep_components, max_keep_ports, max_keep_connectors, mutations,
                    seed, name, output):
    """Write a view (.ccv) derived from MODEL, optionally mutated."""
    kinds = _mutation_list(mutations)
    try:
        m = _load(model_path, parse_model)
    except InputError as e:
        _fail_input(e)
    k2 = 2 * max(keep_components, 0)
    params = ViewDeriveParams(keep_components,
                              k2 if max_keep_ports is None else max_keep_ports,
                              k2 if max_keep_connectors is None else max_keep_connectors,
                              kinds, seed)
    try:
        v, log = generate.derive_view(m, params, name=name)
    except ValueError as e:
        _fail_input(f"infeasible parameters: {e}")
    header = "".join(f"// mutation {rec}\n" for rec in log)
    _emit(header + print_view(v), output)


def _int_list(value: str) -> list[int]:
    try:
        return [int(s) for s in value.split(",") if s.strip()]
    except ValueError:
        raise click.BadParameter("expected comma-separated integers") from None


@main.command("bench")
@click.option("--sizes", default=",".join(map(str, generate.DEFAULT_SIZES)), show_default=True)
@click.option("--repeats", type=int, default=12, show_default=True)
@click.option("--setups", default="variable,fixed", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_dir", envvar="CCVIEW_OUT", default=".", show_default=True)
def cmd_bench(sizes, repeats, setups, seed, out_dir):
    """Run the scalability benchmark; writes bench.csv and bench.json."""
    size_list = _int_list(sizes)
    setup_list = [s.strip() for s in setups.split(",") if s.strip()]
    bad = [s for s in setup_list if s not in generate.SETUPS]
    if bad or not size_list or repeats <= 0 or any(s <= 0 for s in size_list):
        _fail_input(f"invalid benchmark parameters: sizes={sizes} repeats={repeats} "
                    f"setups={setups}")
    report = generate.run_bench(setup_list, size_list, repeats, seed)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "bench.csv").write_text(report.to_csv(), encoding="utf-8")
    (out / "bench.json").write_text(report.to_json(), encoding="utf-8")
    for cell in report.summary():
        click.echo(f"{cell['setup']:<9} size {cell['size']:>4}: mean {cell['mean_verify_ms']:8.2f} ms"
                   f"  max witness {cell['max_witness_ms']:7.2f} ms")
    click.echo(f"wrote {out / 'bench.csv'} and {out / 'bench.json'}")
    sys.exit(EXIT_OK)


if __name__ == "__main__":
    main()
