"""Command-line front end.

Every command is a thin client of the HTTP service: it reads local files,
ships plain-JSON requests, and renders the responses. By default the
requests run against an in-process instance of the app; pass ``--server``
to point the same commands at a running deployment.

Exit codes: 0 success, 1 usage error, 2 data/model error.
"""

from __future__ import annotations

import asyncio
import json
import sys
from pathlib import Path
from typing import Any

import click
import httpx

from . import ingest
from .errors import PricemineError
from .evaluation import render_report_table
from .keywords import HighlightedDocument, render_html, render_keyword_table
from .pipeline import load_model_document, serialize_model_document
from .records import ClassifiedRecord

_STAGE1_NAMES = {"lr": "linear", "linear": "linear", "nn": "mlp", "mlp": "mlp", "svr": "svr"}

_CATEGORIES = ("apartment_rent", "apartment_sale", "house_rent", "house_sale")


class ServiceError(PricemineError):
    """The service (in-process or remote) rejected a request."""


def _post(server: str | None, path: str, payload: dict[str, Any]) -> dict[str, Any]:
    if server:
        with httpx.Client(base_url=server, timeout=600.0) as client:
            response = client.post(path, json=payload)
    else:
        from .service.app import create_app

        async def _run() -> httpx.Response:
            transport = httpx.ASGITransport(app=create_app())
            async with httpx.AsyncClient(
                transport=transport, base_url="http://pricemine.local", timeout=None
            ) as client:
                return await client.post(path, json=payload)

        response = asyncio.run(_run())
    if response.status_code >= 400:
        try:
            detail = response.json().get("detail", response.text)
        except (ValueError, AttributeError):
            detail = response.text
        raise ServiceError(f"service error {response.status_code} on {path}: {detail}")
    return response.json()


def _load_config(path: str | None) -> dict[str, Any]:
    """Read a flat config file: JSON, or ``key = value`` lines."""
    if path is None:
        return {}
    text = Path(path).read_text("utf-8")
    stripped = text.lstrip()
    if stripped.startswith("{"):
        config = json.loads(text)
        if not isinstance(config, dict):
            raise click.UsageError("config file must hold a JSON object")
        return config
    config: dict[str, Any] = {}
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise click.UsageError(f"config line is not key = value: {line!r}")
        key, raw = (part.strip() for part in line.split("=", 1))
        try:
            config[key] = json.loads(raw)
        except json.JSONDecodeError:
            config[key] = raw
    return config


def _resolve(flag: Any, config: dict[str, Any], key: str, default: Any) -> Any:
    """Command-line flags win over config file values, which win over defaults."""
    if flag is not None:
        return flag
    if key in config:
        return config[key]
    return default


def _read_records(path: str) -> list[ClassifiedRecord]:
    reader = ingest.read_jsonl if path.endswith((".jsonl", ".ndjson")) else ingest.read_csv
    records, report = reader(path)
    if report.rejected:
        click.echo(f"warning: skipped {report.rejected} invalid row(s) in {path}", err=True)
        for line, reason in report.rejection_reasons[:10]:
            click.echo(f"  line {line}: {reason}", err=True)
    return records


def _record_payload(record: ClassifiedRecord) -> dict[str, Any]:
    return {
        "title": record.title,
        "description": record.description,
        "beds": record.beds,
        "baths": record.baths,
        "size": record.size,
        "location": record.location,
        "price": record.price,
    }


def _payload_record(payload: dict[str, Any]) -> ClassifiedRecord:
    return ClassifiedRecord(**{name: payload[name] for name in ingest.FIELD_NAMES})


def _text_options(
    config: dict[str, Any], ngram_max, df_min, df_max, corr_threshold,
    min_token_length, tf_norm, stopwords_path,
) -> tuple[dict[str, Any], str | None]:
    """Request payload for the text options plus the resolved stop-word path."""
    options: dict[str, Any] = {
        "min_token_length": _resolve(min_token_length, config, "min_token_length", 4),
        "ngram_max": _resolve(ngram_max, config, "ngram_max", 2),
        "df_min_fraction": _resolve(df_min, config, "df_min", 0.01),
        "df_max_fraction": _resolve(df_max, config, "df_max", 0.5),
        "correlation_threshold": _resolve(corr_threshold, config, "corr_threshold", 0.99),
        "tf_norm": _resolve(tf_norm, config, "tf_norm", "l2"),
    }
    stopwords_path = _resolve(stopwords_path, config, "stopwords", None)
    if stopwords_path is not None:
        from .text import load_stopwords

        options["stopwords"] = sorted(load_stopwords(stopwords_path))
    return options, stopwords_path


def _echo_text_options(options: dict[str, Any], stopwords_path: str | None) -> dict[str, Any]:
    echoed = {k: v for k, v in options.items() if k != "stopwords"}
    if stopwords_path is not None:
        echoed["stopwords"] = str(stopwords_path)
    return echoed


def _cleaning_options(config: dict[str, Any], rent_min, rent_max, sale_min, sale_max) -> dict[str, Any]:
    return {
        "rent_avg_min": _resolve(rent_min, config, "rent_avg_min", 10_000.0),
        "rent_avg_max": _resolve(rent_max, config, "rent_avg_max", 100_000.0),
        "sale_avg_min": _resolve(sale_min, config, "sale_avg_min", 100_000.0),
        "sale_avg_max": _resolve(sale_max, config, "sale_avg_max", 1_000_000.0),
    }


def _echo_config(effective: dict[str, Any]) -> None:
    click.echo(f"config: {json.dumps(effective, sort_keys=True)}")


_text_flags = [
    click.option("--ngram-max", type=int, default=None, help="Longest n-gram length."),
    click.option("--df-min", type=float, default=None, help="Minimum document-frequency fraction."),
    click.option("--df-max", type=float, default=None, help="Maximum document-frequency fraction."),
    click.option("--corr-threshold", type=float, default=None, help="Correlation filter threshold."),
    click.option("--min-token-length", type=int, default=None, help="Shortest kept token."),
    click.option("--tf-norm", type=click.Choice(["l2", "token_count"]), default=None),
    click.option("--stopwords", "stopwords_path", type=click.Path(exists=True, dir_okay=False), default=None, help="Custom stop-word file."),
]

_cleaning_flags = [
    click.option("--rent-min", type=float, default=None, help="Minimum rent per bedroom."),
    click.option("--rent-max", type=float, default=None, help="Maximum rent per bedroom."),
    click.option("--sale-min", type=float, default=None, help="Minimum sale price per bedroom."),
    click.option("--sale-max", type=float, default=None, help="Maximum sale price per bedroom."),
]


def _apply(options):
    def wrap(func):
        for option in reversed(options):
            func = option(func)
        return func

    return wrap


@click.group()
@click.option("--server", default=None, help="Base URL of a running service (default: in-process).")
@click.pass_context
def cli(ctx: click.Context, server: str | None) -> None:
    """Price modelling for real-estate classifieds."""
    ctx.obj = {"server": server}


@cli.command("clean")
@click.option("--input", "input_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--category", type=click.Choice(_CATEGORIES), default=None)
@click.option("--out", "out_path", default=None, help="Destination CSV.")
@_apply(_cleaning_flags)
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.pass_context
def cmd_clean(ctx, input_path, category, out_path, rent_min, rent_max, sale_min, sale_max, config_path) -> None:
    """Deduplicate, drop price outliers, lower-case the text fields."""
    config = _load_config(config_path)
    input_path = _resolve(input_path, config, "input", None)
    category = _resolve(category, config, "category", None)
    out_path = _resolve(out_path, config, "out", None)
    if input_path is None or category is None or out_path is None:
        raise click.UsageError("clean requires --input, --category and --out")
    cleaning = _cleaning_options(config, rent_min, rent_max, sale_min, sale_max)
    _echo_config({"input": input_path, "category": category, "out": out_path, **cleaning})

    records = _read_records(input_path)
    if not records:
        click.echo("warning: input contains no records; writing an empty file", err=True)
    response = _post(
        ctx.obj["server"],
        "/clean",
        {
            "records": [_record_payload(r) for r in records],
            "category": category,
            "cleaning": cleaning,
        },
    )
    ingest.write_csv([_payload_record(p) for p in response["records"]], out_path)
    click.echo(
        f"records: {response['input_count']} -> {response['after_dedup']} -> {response['after_threshold']}"
    )
    click.echo(f"wrote {out_path}")


@cli.command("train")
@click.option("--input", "input_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--category", type=click.Choice(_CATEGORIES), default=None, help="Echoed in the effective config.")
@click.option("--stage1", type=click.Choice(sorted(_STAGE1_NAMES)), default=None)
@_apply(_text_flags)
@_apply(_cleaning_flags)
@click.option("--residual-mode", type=click.Choice(["in_sample", "out_of_fold"]), default=None)
@click.option("--seed", type=int, default=None)
@click.option("--out", "out_path", default=None, help="Destination model file.")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.pass_context
def cmd_train(
    ctx, input_path, category, stage1, ngram_max, df_min, df_max, corr_threshold,
    min_token_length, tf_norm, stopwords_path, rent_min, rent_max, sale_min, sale_max,
    residual_mode, seed, out_path, config_path,
) -> None:
    """Fit the two-stage model on a cleaned file and save it."""
    config = _load_config(config_path)
    input_path = _resolve(input_path, config, "input", None)
    out_path = _resolve(out_path, config, "out", None)
    if input_path is None or out_path is None:
        raise click.UsageError("train requires --input and --out")
    stage1 = _STAGE1_NAMES[_resolve(stage1, config, "stage1", "lr")]
    category = _resolve(category, config, "category", None)
    seed = _resolve(seed, config, "seed", 0)
    residual_mode = _resolve(residual_mode, config, "residual_mode", "in_sample")
    text, stopwords_path = _text_options(
        config, ngram_max, df_min, df_max, corr_threshold, min_token_length, tf_norm, stopwords_path
    )
    cleaning = _cleaning_options(config, rent_min, rent_max, sale_min, sale_max)
    effective = {
        "input": input_path, "stage1": stage1, "seed": seed, "out": out_path,
        **_echo_text_options(text, stopwords_path),
    }
    if category is not None:
        effective["category"] = category
    _echo_config(effective)

    records = _read_records(input_path)
    response = _post(
        ctx.obj["server"],
        "/train",
        {
            "records": [_record_payload(r) for r in records],
            "stage1": {"kind": stage1, "hyperparameters": config.get("stage1_hyperparameters", {}), "seed": seed},
            "text": text,
            "cleaning": cleaning,
            "residual_mode": residual_mode,
        },
    )
    Path(out_path).write_bytes(serialize_model_document(response["model"]))
    click.echo(f"trained on {response['record_count']} records, {response['text_feature_count']} text features")
    click.echo(f"stage-1 training RMSE: {response['stage1_rmse']:.3f}")
    click.echo(f"two-stage training RMSE: {response['two_stage_rmse']:.3f}")
    click.echo(f"wrote {out_path}")


@cli.command("evaluate")
@click.option("--input", "input_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--category", type=click.Choice(_CATEGORIES), default=None)
@click.option("--stage1", type=click.Choice(sorted(_STAGE1_NAMES)), default=None)
@_apply(_text_flags)
@click.option("--folds", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--spread", type=click.Choice(["std", "stderr"]), default="std", help="What follows the +/-.")
@click.option("--out", "out_path", default=None, help="Optional JSON report path.")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.pass_context
def cmd_evaluate(
    ctx, input_path, category, stage1, ngram_max, df_min, df_max, corr_threshold,
    min_token_length, tf_norm, stopwords_path, folds, seed, spread, out_path, config_path,
) -> None:
    """Cross-validate with and without text features and print the comparison."""
    config = _load_config(config_path)
    input_path = _resolve(input_path, config, "input", None)
    category = _resolve(category, config, "category", None)
    if input_path is None or category is None:
        raise click.UsageError("evaluate requires --input and --category")
    stage1 = _STAGE1_NAMES[_resolve(stage1, config, "stage1", "lr")]
    folds = _resolve(folds, config, "folds", 10)
    seed = _resolve(seed, config, "seed", 0)
    out_path = _resolve(out_path, config, "out", None)
    text, stopwords_path = _text_options(
        config, ngram_max, df_min, df_max, corr_threshold, min_token_length, tf_norm, stopwords_path
    )
    effective = {
        "input": input_path, "category": category, "stage1": stage1,
        "folds": folds, "seed": seed, **_echo_text_options(text, stopwords_path),
    }
    _echo_config(effective)

    records = _read_records(input_path)
    response = _post(
        ctx.obj["server"],
        "/evaluate",
        {
            "records": [_record_payload(r) for r in records],
            "category": category,
            "stage1": {"kind": stage1, "hyperparameters": config.get("stage1_hyperparameters", {}), "seed": seed},
            "text": text,
            "folds": folds,
            "seed": seed,
        },
    )
    click.echo(render_report_table(response, spread=spread))
    if out_path is not None:
        artifact = {**response, "effective_config": effective}
        Path(out_path).write_text(json.dumps(artifact, indent=2) + "\n", "utf-8")
        click.echo(f"wrote {out_path}")


@cli.command("keywords")
@click.option("--model", "model_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--top", type=int, default=10, show_default=True, help="Terms per sign.")
@click.option("--out", "out_path", default=None, help="Optional JSON path.")
@click.pass_context
def cmd_keywords(ctx, model_path, top, out_path) -> None:
    """Print the strongest positive and negative terms of a saved model."""
    document = load_model_document(model_path)
    response = _post(ctx.obj["server"], "/keywords", {"model": document, "top_k": top})
    click.echo(render_keyword_table(response))
    if out_path is not None:
        Path(out_path).write_text(json.dumps(response, indent=2) + "\n", "utf-8")
        click.echo(f"wrote {out_path}")


@cli.command("highlight")
@click.option("--model", "model_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--input", "input_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--index", type=int, default=0, show_default=True, help="Record index in the input file.")
@click.option("--out", "out_path", required=True, help="Destination HTML file.")
@click.pass_context
def cmd_highlight(ctx, model_path, input_path, index, out_path) -> None:
    """Render one record with its price-moving words coloured."""
    document = load_model_document(model_path)
    records = _read_records(input_path)
    if not 0 <= index < len(records):
        raise ServiceError(f"record index {index} out of range (file has {len(records)} records)")
    response = _post(
        ctx.obj["server"],
        "/highlight",
        {"model": document, "record": _record_payload(records[index])},
    )
    render_html(HighlightedDocument.from_dict(response), out_path)
    click.echo(f"wrote {out_path}")


@cli.command("synth")
@click.option("--count", type=int, default=2000, show_default=True)
@click.option("--category", type=click.Choice(_CATEGORIES), default="apartment_rent", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--noise-sigma", type=float, default=5000.0, show_default=True)
@click.option("--keyword-count", type=int, default=20, show_default=True)
@click.option("--effect-min", type=float, default=5000.0, show_default=True)
@click.option("--effect-max", type=float, default=20000.0, show_default=True)
@click.option("--out", "out_path", required=True, help="Destination CSV.")
@click.option("--effects-out", "effects_path", default=None, help="Optional JSON file with the planted effects.")
@click.pass_context
def cmd_synth(ctx, count, category, seed, noise_sigma, keyword_count, effect_min, effect_max, out_path, effects_path) -> None:
    """Generate a synthetic corpus with known keyword effects."""
    response = _post(
        ctx.obj["server"],
        "/synth",
        {
            "count": count,
            "category": category,
            "seed": seed,
            "noise_sigma": noise_sigma,
            "keyword_count": keyword_count,
            "effect_min": effect_min,
            "effect_max": effect_max,
        },
    )
    ingest.write_csv([_payload_record(p) for p in response["records"]], out_path)
    click.echo(f"wrote {len(response['records'])} records to {out_path}")
    if effects_path is not None:
        Path(effects_path).write_text(
            json.dumps(response["keyword_effects"], indent=2, sort_keys=True) + "\n", "utf-8"
        )
        click.echo(f"wrote {effects_path}")


@cli.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def cmd_serve(host: str, port: int) -> None:
    """Run the HTTP service."""
    import uvicorn

    from .service.app import create_app

    uvicorn.run(create_app(), host=host, port=port)


def main(argv: list[str] | None = None) -> int:
    """Entry point with the documented exit codes."""
    try:
        cli.main(args=argv, prog_name="pricemine", standalone_mode=False)
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return 1
    except click.ClickException as exc:
        exc.show()
        return 1
    except PricemineError as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
