"""Command-line entry point: KB management, experiments, rates, serving.

Usage errors (bad flags, missing files) exit with status 2; data errors
(malformed phrasebooks, unspellable targets, corrupt KB files) exit with
status 1 and a message.  Every command is deterministic given an explicit
``--seed``.
"""

from __future__ import annotations

from pathlib import Path

import click

from .insilico import (
    SentenceResult,
    build_experiment_kb,
    corpora_names,
    load_corpus,
    load_phrasebook,
    run_experiment,
    simulate_sentence,
    split_phrasebook,
    write_report,
)
from .kb import KnowledgeBase
from .metrics import TimingConfig
from .rates import SPELLERS, estimate_rates
from .text import NORMALIZE_MODES

_SPELLER = click.Choice(sorted(SPELLERS))
_ONOFF = click.Choice(["on", "off"])
_IN_FILE = click.Path(exists=True, dir_okay=False, allow_dash=False)


def _data_errors(func):
    """Surface domain failures as exit-1 CLI errors."""
    import functools

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except click.ClickException:
            raise
        except (ValueError, OSError) as exc:
            raise click.ClickException(str(exc)) from exc

    return wrapper


def _load_kb(path: str) -> KnowledgeBase:
    return KnowledgeBase.load(path)


def _read_phrasebook(path: str, mode: str):
    with open(path, encoding="utf-8") as fh:
        return load_phrasebook(fh, mode=mode)


def _timing_options(func):
    for option in reversed(
        (
            click.option("--nrs", type=int, default=12, show_default=True,
                         help="row/column stimulation repetitions"),
            click.option("--sd", type=float, default=0.125, show_default=True,
                         help="stimulus duration, seconds"),
            click.option("--isi", type=float, default=0.125, show_default=True,
                         help="inter-stimulus interval, seconds"),
            click.option("--pre", type=float, default=3.0, show_default=True,
                         help="pre-selection pause, seconds"),
            click.option("--post", type=float, default=3.0, show_default=True,
                         help="post-selection pause, seconds"),
            click.option("--ppd", type=float, default=10.0, show_default=True,
                         help="prediction-reading pause, seconds"),
        )
    ):
        func = option(func)
    return func


@click.group()
def main() -> None:
    """Adaptive selection-matrix speller toolkit."""


@main.command("kb-build")
@click.option("--in", "in_path", type=_IN_FILE, required=True,
              help="phrasebook text file (count<TAB>sentence or bare sentences)")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), required=True,
              help="knowledge-base file to write")
@click.option("--normalize", "mode", type=click.Choice(sorted(NORMALIZE_MODES)),
              default="table", show_default=True, help="text normalization mode")
@_data_errors
def cmd_kb_build(in_path: str, out_path: str, mode: str) -> None:
    """Build a knowledge-base file from a phrasebook."""
    kb = KnowledgeBase()
    with open(in_path, encoding="utf-8") as fh:
        stats = kb.ingest(fh, mode=mode)
    kb.save(out_path)
    click.echo(
        f"{out_path}: {stats.sentences} sentences, "
        f"{stats.distinct_words} distinct words, "
        f"{stats.discarded} unterminated tails discarded"
    )


@main.command("split")
@click.option("--in", "in_path", type=_IN_FILE, required=True, help="corpus file")
@click.option("--n-in", type=int, required=True,
              help="sentences sampled into the held-in test set")
@click.option("--n-out", type=int, required=True,
              help="sentences sampled into the held-out test set")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out-dir", type=click.Path(file_okay=False), required=True)
@click.option("--normalize", "mode", type=click.Choice(sorted(NORMALIZE_MODES)),
              default="table", show_default=True)
@_data_errors
def cmd_split(in_path: str, n_in: int, n_out: int, seed: int, out_dir: str, mode: str) -> None:
    """Partition a corpus into a_in/a_out test sets and the p_l phrasebook.

    Also writes experiment.kb: the p_l sentences plus a count-1 vocabulary
    entry for every held-out word they miss, so a_out stays spellable while
    its sentences remain unseen.
    """
    corpus = _read_phrasebook(in_path, mode)
    parts = split_phrasebook(corpus, n_in, n_out, seed)
    directory = Path(out_dir)
    directory.mkdir(parents=True, exist_ok=True)
    for name, phrasebook in (
        ("a_in", parts.a_in),
        ("a_out", parts.a_out),
        ("p_l", parts.p_l),
    ):
        path = directory / f"{name}.txt"
        with open(path, "w", encoding="utf-8") as fh:
            for sentence, count in phrasebook:
                fh.write(f"{count}\t{sentence}\n")
        click.echo(f"{path}: {len(phrasebook)} sentences")
    kb = build_experiment_kb(parts)
    kb_path = directory / "experiment.kb"
    kb.save(kb_path)
    click.echo(f"{kb_path}: {kb.sentences.total} sentences, {kb.words.nwords} distinct words")


@main.command("simulate")
@click.option("--kb", "kb_path", type=_IN_FILE, required=True, help="knowledge-base file")
@click.option("--phrasebook", "pb_path", type=_IN_FILE, required=True,
              help="sentences to spell (count<TAB>sentence or bare)")
@click.option("--speller", type=_SPELLER, default="poly", show_default=True)
@click.option("--predictions", type=_ONOFF, default="on", show_default=True)
@_timing_options
@click.option("--p-sharp", type=int, default=4, show_default=True,
              help="prediction slots exceed this when candidates allow")
@click.option("--csv", "csv_path", type=click.Path(dir_okay=False, allow_dash=True),
              default="-", show_default=True, help="report destination")
@click.option("--jobs", type=int, default=1, show_default=True,
              help="parallel sentence-simulation workers")
@click.option("--learn/--no-learn", default=False, show_default=True,
              help="absorb each sentence into the KB as it completes")
@click.option("--lang", default="xx", show_default=True, help="report language tag")
@click.option("--seed", type=int, default=0, show_default=True,
              help="seed for the paired channel-rate estimate")
@click.option("--rates-n", type=int, default=1000, show_default=True,
              help="selections per channel-rate run")
@click.option("--rates-runs", type=int, default=20, show_default=True,
              help="channel-rate Monte-Carlo runs")
@_data_errors
def cmd_simulate(
    kb_path: str,
    pb_path: str,
    speller: str,
    predictions: str,
    nrs: int,
    sd: float,
    isi: float,
    pre: float,
    post: float,
    ppd: float,
    p_sharp: int,
    csv_path: str,
    jobs: int,
    learn: bool,
    lang: str,
    seed: int,
    rates_n: int,
    rates_runs: int,
) -> None:
    """Spell a whole phrasebook error-free and write one aggregate CSV row."""
    kb = _load_kb(kb_path)
    phrasebook = _read_phrasebook(pb_path, "table")
    timing = TimingConfig(sd_s=sd, isi_s=isi, pre_s=pre, post_s=post, ppd_s=ppd, nrs=nrs)
    rows = run_experiment(
        kb,
        {Path(pb_path).stem: phrasebook},
        lang=lang,
        configs=[(speller, predictions == "on")],
        timing=timing,
        seed=seed,
        rates_n=rates_n,
        rates_runs=rates_runs,
        p_sharp=p_sharp,
        jobs=jobs,
        learn=learn,
    )
    with click.open_file(csv_path, "w") as fh:
        write_report(rows, fh)


@main.command("rates")
@click.option("--kb", "kb_path", type=_IN_FILE, required=True, help="knowledge-base file")
@click.option("--speller", type=_SPELLER, default="poly", show_default=True)
@click.option("--predictions", type=_ONOFF, default="on", show_default=True)
@click.option("--n", type=int, default=1000, show_default=True,
              help="selections per run")
@click.option("--runs", type=int, default=32, show_default=True,
              help="Monte-Carlo runs to average")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--p-sharp", type=int, default=4, show_default=True)
@_data_errors
def cmd_rates(
    kb_path: str, speller: str, predictions: str, n: int, runs: int, seed: int, p_sharp: int
) -> None:
    """Estimate the per-selection information rates of a speller on a KB."""
    kb = _load_kb(kb_path)
    estimate = estimate_rates(
        kb,
        speller=speller,
        predictions=predictions == "on",
        n=n,
        runs=runs,
        seed=seed,
        p_sharp=p_sharp,
    )
    click.echo(f"r_n {estimate.r_n:.6f}")
    click.echo(f"R_n {estimate.R_n:.6f}")
    click.echo(f"D_n {estimate.D_n:.6f}")
    click.echo(f"std_error {estimate.std_error:.6f}")
    click.echo(f"n {estimate.n}")
    click.echo(f"runs {estimate.runs}")


@main.command("serve")
@click.option("--port", type=int, default=None,
              help="listening port [default: PORT env or 8077]")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--kb-dir", type=click.Path(file_okay=False), default=None,
              help="knowledge-base storage directory [default: KB_DIR env]")
def cmd_serve(port: int | None, host: str, kb_dir: str | None) -> None:
    """Run the HTTP session service."""
    import uvicorn

    from .service import create_app, default_port

    uvicorn.run(create_app(kb_dir), host=host, port=port if port is not None else default_port())


@main.command("spell")
@click.option("--kb", "kb_path", type=_IN_FILE, required=True, help="knowledge-base file")
@click.option("--target", required=True, help="sentence to spell, e.g. 'ok_go.'")
@click.option("--speller", type=_SPELLER, default="poly", show_default=True)
@click.option("--predictions", type=_ONOFF, default="on", show_default=True)
@click.option("--p-sharp", type=int, default=4, show_default=True)
@_data_errors
def cmd_spell(kb_path: str, target: str, speller: str, predictions: str, p_sharp: int) -> None:
    """Trace how the error-free oracle spells one target sentence."""
    kb = _load_kb(kb_path)
    spelled = [""]

    def show(matrix, record) -> None:
        spelled[0] += record.delta
        offered = " ".join(p.word for p in matrix.predictions) or "-"
        click.echo(
            f"step {record.step:3d}  {matrix.rows}x{matrix.cols}  "
            f"predictions: {offered}  |  {record.symbol_kind} {record.label!r} "
            f"+{record.delta!r}  ->  {spelled[0]}"
        )

    result: SentenceResult = simulate_sentence(
        kb,
        target,
        speller=speller,
        predictions=predictions == "on",
        p_sharp=p_sharp,
        trace=show,
    )
    click.echo(
        f"spelled {result.text!r}: {result.selections} selections, "
        f"{result.chars} characters, {result.time_s:.3f} s model time"
    )


@main.command("corpus")
@click.option("--name", default=None,
              help="bundled corpus to export; omit to list available names")
@click.option("--out", "out_path", type=click.Path(dir_okay=False, allow_dash=True),
              default="-", show_default=True)
@_data_errors
def cmd_corpus(name: str | None, out_path: str) -> None:
    """List or export the corpora bundled with the package."""
    if name is None:
        for corpus_name in corpora_names():
            click.echo(corpus_name)
        return
    phrasebook = load_corpus(name)
    with click.open_file(out_path, "w") as fh:
        for sentence, count in phrasebook:
            fh.write(f"{count}\t{sentence}\n")


if __name__ == "__main__":
    main()
