"""Command line surface mirroring the template-design workflow: lint the
catalog, get recommendations, render and validate a message, serve the UI.

Exit codes: 0 success, 1 domain failure (diagnostics, failed validation,
rule conflicts), 2 usage error. With ``--json`` each subcommand prints the
same canonical payload the HTTP service returns for the matching endpoint.
"""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click

from .api import (
    ApiError,
    DataPaths,
    SessionRequest,
    Workspace,
    canonical_json,
    default_data_root,
    lint_payload,
    load_workspace,
    parse_session_request,
    recommend_payload,
    render_payload,
    templates_payload,
)
from .catalog import CatalogError
from .dsl import FILE_EXTENSION, Severity, TemplateSource, parse_source

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_USAGE = 2

DEFAULT_PORT = 8765
PORT_ENV = "CMF_PORT"


def _data_options(fn):
    root = default_data_root()
    fn = click.option(
        "--catalog",
        "catalog_dir",
        type=click.Path(file_okay=False, path_type=Path),
        default=root / "catalog",
        show_default="bundled demo catalog",
        help="Directory of .cmt template files.",
    )(fn)
    fn = click.option(
        "--rules",
        "rules_dir",
        type=click.Path(file_okay=False, path_type=Path),
        default=root / "rules",
        show_default="bundled demo rules",
        help="Directory of *.rules.json files.",
    )(fn)
    fn = click.option(
        "--channels",
        "channels_file",
        type=click.Path(dir_okay=False, path_type=Path),
        default=root / "channels.json",
        show_default="bundled channel profiles",
        help="Channel profile JSON file.",
    )(fn)
    return fn


def _load(catalog_dir: Path, rules_dir: Path, channels_file: Path) -> Workspace:
    try:
        return load_workspace(DataPaths(catalog_dir, rules_dir, channels_file))
    except CatalogError as exc:
        for issue in exc.issues:
            click.echo(str(issue), err=True)
        raise SystemExit(EXIT_DOMAIN) from None


def _parse_json_flag(raw: str, flag: str) -> dict:
    try:
        value = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise click.BadParameter(f"invalid JSON: {exc}", param_hint=flag)
    if not isinstance(value, dict):
        raise click.BadParameter("must be a JSON object", param_hint=flag)
    return value


def _fail_api_error(exc: ApiError, as_json: bool) -> "SystemExit":
    if as_json:
        click.echo(canonical_json(exc.payload()))
    else:
        click.echo(f"error [{exc.code}]: {exc.message}", err=True)
    return SystemExit(EXIT_DOMAIN)


@click.group()
def main() -> None:
    """Design, recommend and validate promotional message templates."""


@main.command()
@click.argument("paths", nargs=-1, required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--json", "as_json", is_flag=True, help="Emit machine-readable diagnostics.")
def lint(paths: tuple[Path, ...], as_json: bool) -> None:
    """Parse template files and report every diagnostic with its position."""
    files: list[Path] = []
    for path in paths:
        if path.is_dir():
            files.extend(sorted(path.rglob(f"*{FILE_EXTENSION}")))
        else:
            files.append(path)
    results = []
    seen_ids: dict[str, Path] = {}
    failed = False
    for path in files:
        try:
            text = path.read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as exc:
            click.echo(f"{path}: error: cannot read file: {exc}", err=True)
            failed = True
            continue
        parsed = parse_source(TemplateSource(text, origin=str(path)))
        diags = list(parsed.diagnostics)
        for spec in parsed.templates:
            if spec.id in seen_ids:
                click.echo(
                    f"{path}: error: duplicate template id {spec.id!r}, "
                    f"first declared in {seen_ids[spec.id]}",
                    err=True,
                )
                failed = True
            else:
                seen_ids[spec.id] = path
        results.append((str(path), diags))
        if any(d.severity is Severity.ERROR for d in diags):
            failed = True
    if as_json:
        click.echo(canonical_json(lint_payload(results, ok=not failed)))
    else:
        for path_str, diags in results:
            for d in diags:
                click.echo(f"{path_str}:{d}")
        total = sum(len(d) for _, d in results)
        click.echo(f"checked {len(results)} file(s), {total} diagnostic(s)")
    raise SystemExit(EXIT_DOMAIN if failed else EXIT_OK)


@main.command()
@click.option("--facts", "facts_raw", required=True, help="Session facts as a JSON object.")
@click.option("--ruleset", "ruleset_id", default=None, help="Ruleset name (default: demo).")
@click.option("--k", type=int, default=None, help="Maximum number of recommendations.")
@click.option("--json", "as_json", is_flag=True, help="Emit the canonical JSON payload.")
@_data_options
def recommend(
    facts_raw: str,
    ruleset_id: str | None,
    k: int | None,
    as_json: bool,
    catalog_dir: Path,
    rules_dir: Path,
    channels_file: Path,
) -> None:
    """Rank catalog templates for a set of product/audience facts."""
    body: dict = {"facts": _parse_json_flag(facts_raw, "--facts")}
    if ruleset_id is not None:
        body["ruleset_id"] = ruleset_id
    if k is not None:
        body["k"] = k
    ws = _load(catalog_dir, rules_dir, channels_file)
    try:
        session: SessionRequest = parse_session_request(body)
        payload = recommend_payload(ws, session)
    except ApiError as exc:
        raise _fail_api_error(exc, as_json)
    if as_json:
        click.echo(canonical_json(payload))
    else:
        if not payload["recommendations"]:
            click.echo("no recommendations (catalog empty or nothing derived)")
        for i, rec in enumerate(payload["recommendations"], start=1):
            matched = ", ".join(f"{m['attr']}={m['value']}" for m in rec["matched"]) or "none"
            click.echo(f"{i}. {rec['template_id']}  score={rec['score']:.2f}  matched: {matched}")
        fired = ", ".join(t["rule_id"] for t in payload["trace"]) or "none"
        click.echo(f"fired rules: {fired}")
    raise SystemExit(EXIT_OK)


@main.command()
@click.option("--template", "template_id", required=True, help="Template id to render.")
@click.option("--bindings", "bindings_raw", required=True, help="Slot bindings as a JSON object.")
@click.option("--channel", "channel_id", required=True, help="Channel profile id to validate against.")
@click.option("--json", "as_json", is_flag=True, help="Emit the canonical JSON payload.")
@_data_options
def render(
    template_id: str,
    bindings_raw: str,
    channel_id: str,
    as_json: bool,
    catalog_dir: Path,
    rules_dir: Path,
    channels_file: Path,
) -> None:
    """Fill a template's slots and validate the message against a channel.

    Exits 1 when the validation verdict is fail."""
    bindings = _parse_json_flag(bindings_raw, "--bindings")
    for name, value in bindings.items():
        if not isinstance(value, str):
            raise click.BadParameter(f"binding {name!r} must be a string", param_hint="--bindings")
    ws = _load(catalog_dir, rules_dir, channels_file)
    try:
        payload = render_payload(ws, template_id, bindings, channel_id)
    except ApiError as exc:
        raise _fail_api_error(exc, as_json)
    if as_json:
        click.echo(canonical_json(payload))
    else:
        for part in payload["parts"]:
            click.echo(f"[{part['kind']}] {part['text']}")
        report = payload["report"]
        click.echo(f"verdict: {report['verdict']}")
        for v in report["violations"]:
            click.echo(f"  {v['severity']}: {v['detail']}")
        if payload["unused_bindings"]:
            click.echo("warning: unused bindings: " + ", ".join(payload["unused_bindings"]))
    ok = payload["report"]["verdict"] == "pass"
    raise SystemExit(EXIT_OK if ok else EXIT_DOMAIN)


@main.group()
def catalog() -> None:
    """Inspect the template catalog."""


@catalog.command("list")
@click.option("--json", "as_json", is_flag=True, help="Emit the canonical JSON payload.")
@_data_options
def catalog_list(as_json: bool, catalog_dir: Path, rules_dir: Path, channels_file: Path) -> None:
    """List loaded templates with their channels and parts."""
    ws = _load(catalog_dir, rules_dir, channels_file)
    payload = templates_payload(ws)
    if as_json:
        click.echo(canonical_json(payload))
    else:
        for tpl in payload["templates"]:
            parts = ", ".join(p["kind"] for p in tpl["parts"])
            click.echo(f"{tpl['id']}  channel={tpl['channel']}  parts: {parts}")
        click.echo(f"{len(payload['templates'])} template(s)")
    raise SystemExit(EXIT_OK)


def resolve_port(flag: int | None, env: str | None) -> int:
    """--port wins over CMF_PORT wins over the default."""
    if flag is not None:
        return flag
    if env:
        try:
            return int(env)
        except ValueError:
            raise click.BadParameter(f"{PORT_ENV} must be an integer, got {env!r}") from None
    return DEFAULT_PORT


@main.command()
@click.option("--port", type=int, default=None, help=f"Listen port (default {DEFAULT_PORT}, env {PORT_ENV}).")
@click.option("--host", default="127.0.0.1", show_default=True, help="Bind address.")
@click.option(
    "--ui-dir",
    type=click.Path(file_okay=False, path_type=Path),
    default=None,
    help="Directory of built UI assets to serve at /.",
)
@_data_options
def serve(
    port: int | None,
    host: str,
    ui_dir: Path | None,
    catalog_dir: Path,
    rules_dir: Path,
    channels_file: Path,
) -> None:
    """Run the HTTP service (and the composition UI when --ui-dir is given)."""
    import uvicorn

    from .service import create_app_from_paths

    paths = DataPaths(catalog_dir, rules_dir, channels_file)
    try:
        app = create_app_from_paths(paths, ui_dir=ui_dir)
    except CatalogError as exc:
        for issue in exc.issues:
            click.echo(str(issue), err=True)
        raise SystemExit(EXIT_DOMAIN) from None
    resolved = resolve_port(port, os.environ.get(PORT_ENV))
    uvicorn.run(app, host=host, port=resolved, log_level="info")


if __name__ == "__main__":
    sys.exit(main())
