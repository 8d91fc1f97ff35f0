"""Command line front end: interactive chat, the HTTP server, and the
parsing-accuracy harness."""

from __future__ import annotations

import sys
import tempfile
from pathlib import Path

import click

from .config import AppConfig, load_config
from .nl.evaluate import EmptyBackend, GoldEchoBackend, builtin_sample_path, evaluate_parsing
from .nl.live import LiveBackend
from .sessions import SessionStore
from .state import StateClosedError


def _app_config(config_path, data_dir=None, kb=None, graph=None, seed_jump=None) -> AppConfig:
    config = load_config(config_path) if config_path else AppConfig()
    overrides = {}
    if data_dir is not None:
        overrides["data_dir"] = Path(data_dir)
    if kb is not None:
        overrides["kb_path"] = Path(kb)
    if graph is not None:
        overrides["graph_path"] = Path(graph)
    if seed_jump is not None:
        overrides["p_jump"] = seed_jump
    if overrides:
        from dataclasses import replace

        config = replace(config, **overrides)
    return config


@click.group()
def main():
    """Symbolic dialogue engine."""


@main.command()
@click.option("--task", type=click.Choice(["concierge", "companion"]), required=True)
@click.option("--backend", type=click.Choice(["mock", "live"]), default="mock", show_default=True)
@click.option("--seed", type=int, default=None, help="rng seed for reproducible sessions")
@click.option("--kb", type=click.Path(exists=True), default=None, help="restaurant table (CSV)")
@click.option("--graph", type=click.Path(exists=True), default=None, help="concept graph (YAML)")
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--data-dir", type=click.Path(), default=None, help="session log directory (default: temporary)")
@click.option("--debug", is_flag=True, help="print the predicate blocks under each turn")
def chat(task, backend, seed, kb, graph, config_path, data_dir, debug):
    """Interactive terminal conversation."""
    if data_dir is None:
        data_dir = tempfile.mkdtemp(prefix="symdial-")
    config = _app_config(config_path, data_dir=data_dir, kb=kb, graph=graph)
    store = SessionStore(config)
    session, opening = store.create(task, backend, seed)
    click.echo(f"[session {session.id} | task={task} backend={backend} seed={session.seed}]")
    if opening:
        if debug:
            click.echo(click.style(f"  next: {opening.action}", dim=True))
        click.echo(f"bot> {opening.reply}")
    while True:
        try:
            text = click.prompt("you", prompt_suffix="> ")
        except (EOFError, KeyboardInterrupt, click.Abort):
            click.echo("\n[bye]")
            return
        try:
            result = store.post(session.id, text)
        except StateClosedError:
            click.echo("[session closed]")
            return
        if debug:
            click.echo(click.style(f"  themes: {result.themes or '(none)'}", dim=True))
            click.echo(click.style(f"  action: {result.action}", dim=True))
        click.echo(f"bot> {result.reply}")
        if result.closed:
            return


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8080, show_default=True)
@click.option("--data-dir", type=click.Path(), default="sessions", show_default=True)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--web-dir", type=click.Path(exists=True), default=None, help="serve a built web client at /app")
def serve(host, port, data_dir, config_path, web_dir):
    """Run the HTTP service."""
    import uvicorn

    from .service import create_app

    config = _app_config(config_path, data_dir=data_dir)
    app = create_app(config, web_dir=Path(web_dir) if web_dir else None)
    uvicorn.run(app, host=host, port=port, log_level="warning")


@main.command(name="eval")
@click.option("--dataset", type=click.Path(exists=True), default=None,
              help="CSV with mr/ref columns (default: packaged 20-row sample)")
@click.option("--backend", type=click.Choice(["gold-echo", "empty", "live"]), default="gold-echo",
              show_default=True)
@click.option("--shots", type=int, default=0, show_default=True)
@click.option("--limit", type=int, default=None)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--out", type=click.Path(), default=None, help="write the JSON report here")
def eval_cmd(dataset, backend, shots, limit, config_path, out):
    """Measure parsing accuracy of a backend over a meaning-representation dataset."""
    path = Path(dataset) if dataset else builtin_sample_path()
    if backend == "gold-echo":
        nl_backend = GoldEchoBackend.for_dataset(path)
    elif backend == "empty":
        nl_backend = EmptyBackend()
    else:
        config = load_config(config_path) if config_path else AppConfig()
        nl_backend = LiveBackend(config.backend)
    report = evaluate_parsing(path, nl_backend, shots=shots, limit=limit)
    click.echo(f"accuracy: {report.accuracy:.4f} ({report.correct}/{report.evaluated}, shots={report.shots})")
    if out:
        Path(out).write_text(report.to_json())
        click.echo(f"report written to {out}")
    else:
        click.echo(report.to_json())


def chat_entry():
    """Console-script alias so `chat --task ...` works directly."""
    sys.exit(chat.main(standalone_mode=True))


if __name__ == "__main__":
    main()
