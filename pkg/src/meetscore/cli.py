"""Command-line surface: validate, prep, stats, score, score-diar."""

from __future__ import annotations

import csv
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import click

from . import __version__
from .align import DEFAULT_COLLAR, cp_wer, tcp_wer
from .diarmetrics import (
    DEFAULT_DER_COLLAR,
    DerOptions,
    DerResult,
    SpkCountResult,
    der,
    speaker_count_errors,
)
from .errors import MeetscoreError, ParseError, SchemaError
from .seglst import (
    SegLst,
    list_scenarios,
    list_splits,
    load_seglst,
    save_seglst,
    scan_layout,
    validate,
)
from .stats import split_stats
from .textnorm import default_config, load_config, normalize_seglst

EXIT_OK = 0
EXIT_FINDINGS = 1
EXIT_INPUT_ERROR = 2

MAX_HYPOTHESES = 4


class CollarType(click.ParamType):
    name = "seconds"

    def convert(self, value, param, ctx):
        if isinstance(value, float):
            return value
        if str(value).lower() in ("inf", "infinity"):
            return math.inf
        try:
            collar = float(value)
        except ValueError:
            self.fail(f"{value!r} is not a number or 'inf'", param, ctx)
        if collar < 0:
            self.fail("collar must be non-negative", param, ctx)
        return collar


def _norm_cfg(path: str | None):
    return load_config(path) if path else default_config()


def _fail(message: str, code: int = EXIT_INPUT_ERROR):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


@click.group()
@click.version_option(__version__)
def main():
    """Scoring toolkit for long-form multi-talker speech transcription."""


# ---------------------------------------------------------------- validate

@main.command("validate")
@click.argument("root", type=click.Path(exists=True, file_okay=False))
def cmd_validate(root):
    """Check dataset layout and every transcription file under ROOT."""
    findings = []
    try:
        scenarios = list_scenarios(root)
    except MeetscoreError as e:
        _fail(str(e))
    if not scenarios:
        _fail(f"no scenario directories under {root}")
    for scenario in scenarios:
        for subdir in ("transcriptions", "transcriptions_scoring"):
            if not (Path(root) / scenario / subdir).is_dir():
                continue
            try:
                splits = list_splits(root, scenario, subdir=subdir)
            except MeetscoreError as e:
                findings.append(str(e))
                continue
            for split in splits:
                try:
                    manifest = scan_layout(root, scenario, split, subdir=subdir)
                except MeetscoreError as e:
                    findings.append(str(e))
                    continue
                for sid, path in manifest.session_files.items():
                    try:
                        s = load_seglst(path)
                    except (ParseError, SchemaError) as e:
                        findings.append(str(e))
                        continue
                    for v in validate(s):
                        findings.append(f"{path}: {v}")
                    other = [x for x in s.session_ids() if x != sid]
                    if other:
                        findings.append(f"{path}: contains foreign session ids {other}")
    for finding in findings:
        click.echo(finding)
    click.echo(f"{len(findings)} finding(s)")
    sys.exit(EXIT_FINDINGS if findings else EXIT_OK)


# -------------------------------------------------------------------- prep

@main.command("prep")
@click.argument("root", type=click.Path(exists=True, file_okay=False))
@click.option("--norm-config", type=click.Path(exists=True, dir_okay=False), default=None)
def cmd_prep(root, norm_config):
    """Write transcriptions_scoring/ copies with scoring normalization applied."""
    cfg = _norm_cfg(norm_config)
    try:
        scenarios = list_scenarios(root)
    except MeetscoreError as e:
        _fail(str(e))
    prepared = 0
    for scenario in scenarios:
        for split in list_splits(root, scenario):
            try:
                manifest = scan_layout(root, scenario, split)
            except MeetscoreError as e:
                _fail(str(e))
            out_dir = Path(root) / scenario / "transcriptions_scoring" / split
            out_dir.mkdir(parents=True, exist_ok=True)
            for sid, path in manifest.session_files.items():
                try:
                    s = load_seglst(path)
                except (ParseError, SchemaError) as e:
                    _fail(str(e))
                problems = [v for v in validate(s) if v.severity == "error"]
                if problems:
                    _fail(f"{path}: {problems[0]}")
                normalized = normalize_seglst(s, cfg)
                dropped = len(s) - len(normalized)
                save_seglst(normalized, out_dir / f"{sid}.json")
                click.echo(f"{scenario}/{split}/{sid}: {len(normalized)} segments, {dropped} dropped")
                prepared += 1
    if prepared == 0:
        _fail("nothing to prepare: no transcription files found")


# ------------------------------------------------------------------- stats

def _stats_rows(root, subdir):
    rows = []
    for scenario in list_scenarios(root):
        base = Path(root) / scenario / subdir
        if not base.is_dir():
            continue
        for split in list_splits(root, scenario, subdir=subdir):
            manifest = scan_layout(root, scenario, split, subdir=subdir)
            st = split_stats(manifest)
            if st.activity.total > 0:
                sil, single, ovl = st.activity.ratios_pct()
            else:
                sil = single = ovl = None
            rows.append(
                {
                    "scenario": st.scenario,
                    "split": st.split,
                    "size_hours": st.size_hours,
                    "utterances": st.utterances,
                    "speakers": st.speakers,
                    "sessions": st.sessions,
                    "silence_pct": sil,
                    "single_pct": single,
                    "overlap_pct": ovl,
                }
            )
    return rows


def render_stats_table(rows) -> str:
    header = ("Scenario", "Split", "Size (h)", "Utts", "Spk", "Sess", "sil (%)", "1-spk (%)", "ovl (%)")
    table = [header]
    for r in rows:
        def pct(v):
            return "--" if v is None else f"{v:.1f}"
        table.append(
            (
                r["scenario"],
                r["split"],
                f"{r['size_hours']:.2f}",
                str(r["utterances"]),
                str(r["speakers"]),
                str(r["sessions"]),
                pct(r["silence_pct"]),
                pct(r["single_pct"]),
                pct(r["overlap_pct"]),
            )
        )
    widths = [max(len(row[i]) for row in table) for i in range(len(header))]
    lines = []
    for row in table:
        lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
    return "\n".join(lines) + "\n"


@main.command("stats")
@click.argument("root", type=click.Path(exists=True, file_okay=False))
@click.option("--json", "as_json", is_flag=True, help="Emit machine-readable JSON.")
@click.option("--scoring", is_flag=True, help="Read transcriptions_scoring/ instead of transcriptions/.")
def cmd_stats(root, as_json, scoring):
    """Corpus statistics table per scenario/split."""
    subdir = "transcriptions_scoring" if scoring else "transcriptions"
    try:
        rows = _stats_rows(root, subdir)
    except MeetscoreError as e:
        _fail(str(e))
    if as_json:
        click.echo(json.dumps(rows, indent=2, sort_keys=True))
    else:
        click.echo(render_stats_table(rows), nl=False)


# ------------------------------------------------------------------- score

def _counts_record(counts) -> dict:
    return {
        "substitutions": counts.substitutions,
        "insertions": counts.insertions,
        "deletions": counts.deletions,
        "correct": counts.correct,
        "ref_words": counts.ref_words,
        "errors": counts.errors,
        "error_rate": counts.error_rate,
    }


def _load_scored_pairs(ref_root, hyp_root, split, subdir, allow_missing):
    """Yield (scenario, session, ref SegLst, hyp SegLst or None) deterministically."""
    scenarios = list_scenarios(ref_root)
    if not scenarios:
        raise MeetscoreError(f"no scenario directories under {ref_root}")
    pairs = []
    missing = []
    extra = []
    for scenario in scenarios:
        ref_manifest = scan_layout(ref_root, scenario, split, subdir=subdir)
        try:
            hyp_manifest = scan_layout(hyp_root, scenario, split, subdir=subdir)
            hyp_files = dict(hyp_manifest.session_files)
        except MeetscoreError:
            if not allow_missing:
                raise
            hyp_files = {}
        for sid, path in ref_manifest.session_files.items():
            hyp_path = hyp_files.pop(sid, None)
            if hyp_path is None:
                missing.append(f"{scenario}/{split}/{sid}")
                if not allow_missing:
                    raise MeetscoreError(
                        f"missing hypothesis for session {scenario}/{split}/{sid} "
                        "(use --allow-missing to score it as deletions)"
                    )
            pairs.append((scenario, sid, path, hyp_path))
        extra.extend(f"{scenario}/{split}/{sid}" for sid in sorted(hyp_files))
    return pairs, missing, extra


def _run_sessions(pairs, jobs, score_one):
    """Score sessions (optionally in parallel) and return results in input order."""
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(score_one, pairs))
    return [score_one(p) for p in pairs]


def _macro(values: list[float]) -> float:
    return sum(values) / len(values)


def build_score_report(ref_root, hyp_root, *, split, collar, norm_config=None,
                       pre_normalized=False, allow_missing=False, jobs=1) -> dict:
    subdir = "transcriptions_scoring" if pre_normalized else "transcriptions"
    cfg = None if pre_normalized else (_norm_cfg(norm_config))
    pairs, missing, extra = _load_scored_pairs(ref_root, hyp_root, split, subdir, allow_missing)

    def score_one(item):
        scenario, sid, ref_path, hyp_path = item
        ref_s = load_seglst(ref_path)
        hyp_s = load_seglst(hyp_path) if hyp_path else SegLst()
        if cfg is not None:
            ref_s = normalize_seglst(ref_s, cfg)
            hyp_s = normalize_seglst(hyp_s, cfg)
        return (
            scenario,
            sid,
            tcp_wer(ref_s, hyp_s, collar),
            cp_wer(ref_s, hyp_s),
        )

    results = _run_sessions(pairs, jobs, score_one)

    per_session: dict = {}
    pooled: dict = {}
    for scenario, sid, tcp, cp in results:
        per_session.setdefault(scenario, {})[sid] = {
            "tcpwer": _counts_record(tcp.total_counts),
            "cpwer": _counts_record(cp.total_counts),
            "speaker_pairs": [list(p) for p in tcp.pairs],
        }
        bucket = pooled.setdefault(scenario, {"tcp": [], "cp": []})
        bucket["tcp"].append(tcp.total_counts)
        bucket["cp"].append(cp.total_counts)
    per_scenario = {
        scenario: {
            "tcpwer": _counts_record(sum(b["tcp"][1:], b["tcp"][0])),
            "cpwer": _counts_record(sum(b["cp"][1:], b["cp"][0])),
        }
        for scenario, b in pooled.items()
    }
    return {
        "report": "wer",
        "config": {
            "toolkit_version": __version__,
            "split": split,
            "collar": collar,
            "normalization": "none (pre-normalized inputs)" if pre_normalized
            else (str(norm_config) if norm_config else "builtin"),
            "allow_missing": allow_missing,
        },
        "per_session": per_session,
        "per_scenario": per_scenario,
        "macro": {
            "tcpwer": _macro([r["tcpwer"]["error_rate"] for r in per_scenario.values()]),
            "cpwer": _macro([r["cpwer"]["error_rate"] for r in per_scenario.values()]),
        },
        "missing_sessions": sorted(missing),
        "extra_sessions": sorted(extra),
    }


def _der_record(result: DerResult) -> dict:
    return {
        "missed": result.missed,
        "false_alarm": result.false_alarm,
        "confusion": result.confusion,
        "scored_speech": result.scored_speech,
        "missed_rate": result.missed_rate,
        "false_alarm_rate": result.false_alarm_rate,
        "confusion_rate": result.confusion_rate,
        "der": result.der,
    }


def build_diar_report(ref_root, hyp_root, *, split, der_collar, score_overlap,
                      norm_config=None, pre_normalized=False, allow_missing=False,
                      jobs=1) -> dict:
    subdir = "transcriptions_scoring" if pre_normalized else "transcriptions"
    cfg = None if pre_normalized else (_norm_cfg(norm_config))
    opts = DerOptions(collar=der_collar, score_overlap=score_overlap)
    pairs, missing, extra = _load_scored_pairs(ref_root, hyp_root, split, subdir, allow_missing)

    def score_one(item):
        scenario, sid, ref_path, hyp_path = item
        ref_s = load_seglst(ref_path)
        hyp_s = load_seglst(hyp_path) if hyp_path else SegLst()
        if cfg is not None:
            ref_s = normalize_seglst(ref_s, cfg)
            hyp_s = normalize_seglst(hyp_s, cfg)
        return (
            scenario,
            sid,
            der(ref_s, hyp_s, opts),
            speaker_count_errors(ref_s, hyp_s),
        )

    results = _run_sessions(pairs, jobs, score_one)

    per_session: dict = {}
    pooled: dict = {}
    for scenario, sid, der_res, spk in results:
        per_session.setdefault(scenario, {})[sid] = {
            "der": _der_record(der_res),
            "speaker_count": {
                "ref_speakers": spk.ref_speakers,
                "missed_speakers": spk.missed_speakers,
                "false_alarm_speakers": spk.false_alarm_speakers,
            },
        }
        bucket = pooled.setdefault(scenario, {"der": DerResult.zero(), "spk": SpkCountResult.zero()})
        bucket["der"] = bucket["der"] + der_res
        bucket["spk"] = bucket["spk"] + spk
    per_scenario = {
        scenario: {
            "der": _der_record(b["der"]),
            "speaker_count": {
                "ref_speakers": b["spk"].ref_speakers,
                "missed_speakers": b["spk"].missed_speakers,
                "false_alarm_speakers": b["spk"].false_alarm_speakers,
                "missed_pct": b["spk"].missed_pct,
                "false_alarm_pct": b["spk"].false_alarm_pct,
            },
        }
        for scenario, b in pooled.items()
    }
    return {
        "report": "diarization",
        "config": {
            "toolkit_version": __version__,
            "split": split,
            "der_collar": der_collar,
            "score_overlap": score_overlap,
            "normalization": "none (pre-normalized inputs)" if pre_normalized
            else (str(norm_config) if norm_config else "builtin"),
            "allow_missing": allow_missing,
        },
        "per_session": per_session,
        "per_scenario": per_scenario,
        "macro": {"der": _macro([r["der"]["der"] for r in per_scenario.values()])},
        "missing_sessions": sorted(missing),
        "extra_sessions": sorted(extra),
    }


def report_to_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def report_to_csv(report: dict) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if report["report"] == "wer":
        writer.writerow(
            ["scenario", "session", "metric", "substitutions", "insertions",
             "deletions", "correct", "ref_words", "errors", "error_rate"]
        )
        for scenario in sorted(report["per_session"]):
            for sid in sorted(report["per_session"][scenario]):
                rec = report["per_session"][scenario][sid]
                for metric in ("tcpwer", "cpwer"):
                    c = rec[metric]
                    writer.writerow(
                        [scenario, sid, metric, c["substitutions"], c["insertions"],
                         c["deletions"], c["correct"], c["ref_words"], c["errors"],
                         repr(c["error_rate"])]
                    )
    else:
        writer.writerow(
            ["scenario", "session", "missed", "false_alarm", "confusion",
             "scored_speech", "der"]
        )
        for scenario in sorted(report["per_session"]):
            for sid in sorted(report["per_session"][scenario]):
                d = report["per_session"][scenario][sid]["der"]
                writer.writerow(
                    [scenario, sid, repr(d["missed"]), repr(d["false_alarm"]),
                     repr(d["confusion"]), repr(d["scored_speech"]), repr(d["der"])]
                )
    return buf.getvalue()


def render_score_text(report: dict) -> str:
    lines = []
    if report["report"] == "wer":
        lines.append(f"{'Scenario':<16}{'tcpWER (%)':>12}{'cpWER (%)':>12}")
        for scenario in sorted(report["per_scenario"]):
            rec = report["per_scenario"][scenario]
            lines.append(
                f"{scenario:<16}{100 * rec['tcpwer']['error_rate']:>12.2f}"
                f"{100 * rec['cpwer']['error_rate']:>12.2f}"
            )
        lines.append(
            f"{'macro':<16}{100 * report['macro']['tcpwer']:>12.2f}"
            f"{100 * report['macro']['cpwer']:>12.2f}"
        )
    else:
        lines.append(
            f"{'Scenario':<16}{'MS (%)':>9}{'FA (%)':>9}{'SC (%)':>9}{'DER (%)':>9}"
            f"{'#SPK MS':>9}{'#SPK FA':>9}"
        )
        for scenario in sorted(report["per_scenario"]):
            rec = report["per_scenario"][scenario]
            d, s = rec["der"], rec["speaker_count"]
            lines.append(
                f"{scenario:<16}{100 * d['missed_rate']:>9.2f}{100 * d['false_alarm_rate']:>9.2f}"
                f"{100 * d['confusion_rate']:>9.2f}{100 * d['der']:>9.2f}"
                f"{s['missed_pct']:>9.2f}{s['false_alarm_pct']:>9.2f}"
            )
        lines.append(f"{'macro DER (%)':<16}{100 * report['macro']['der']:>9.2f}")
    if report["missing_sessions"]:
        lines.append("missing sessions: " + ", ".join(report["missing_sessions"]))
    return "\n".join(lines) + "\n"


def _emit_reports(reports, hyp_roots, as_json, as_csv, output_dir, renderer):
    if as_json and as_csv:
        _fail("choose at most one of --json/--csv")
    def render(report):
        if as_json:
            return report_to_json(report)
        if as_csv:
            return report_to_csv(report)
        return renderer(report)
    if output_dir is not None:
        ext = "json" if as_json else ("csv" if as_csv else "txt")
        out = Path(output_dir)
        out.mkdir(parents=True, exist_ok=True)
        for i, report in enumerate(reports, start=1):
            (out / f"report-{i}.{ext}").write_text(render(report), encoding="utf-8")
            click.echo(f"wrote {out / f'report-{i}.{ext}'}")
    else:
        for i, report in enumerate(reports):
            if len(reports) > 1:
                click.echo(f"== hypothesis {i + 1}: {hyp_roots[i]} ==")
            click.echo(render(report), nl=False)


_score_common = [
    click.argument("ref_root", type=click.Path(exists=True, file_okay=False)),
    click.option("--hyp", "hyp_roots", type=click.Path(exists=True, file_okay=False),
                 multiple=True, required=True,
                 help=f"Hypothesis root (repeatable, up to {MAX_HYPOTHESES})."),
    click.option("--split", default="dev", show_default=True),
    click.option("--norm-config", type=click.Path(exists=True, dir_okay=False), default=None),
    click.option("--pre-normalized", is_flag=True,
                 help="Inputs are already normalized; read transcriptions_scoring/."),
    click.option("--allow-missing", is_flag=True,
                 help="Score missing hypothesis sessions as all deletions."),
    click.option("--jobs", type=click.IntRange(min=1), default=1, show_default=True),
    click.option("--json", "as_json", is_flag=True),
    click.option("--csv", "as_csv", is_flag=True),
    click.option("--output-dir", type=click.Path(file_okay=False), default=None),
]


def _with_common(command):
    for deco in reversed(_score_common):
        command = deco(command)
    return command


@main.command("score")
@click.option("--collar", type=CollarType(), default=DEFAULT_COLLAR, show_default=True,
              help="tcpWER collar in seconds, or 'inf'.")
@_with_common
def cmd_score(ref_root, hyp_roots, split, collar, norm_config, pre_normalized,
              allow_missing, jobs, as_json, as_csv, output_dir):
    """Score hypothesis submissions with tcpWER (ranking metric) and cpWER."""
    if len(hyp_roots) > MAX_HYPOTHESES:
        _fail(f"at most {MAX_HYPOTHESES} hypothesis sets per invocation")
    reports = []
    for hyp_root in hyp_roots:
        try:
            reports.append(
                build_score_report(
                    ref_root, hyp_root, split=split, collar=collar,
                    norm_config=norm_config, pre_normalized=pre_normalized,
                    allow_missing=allow_missing, jobs=jobs,
                )
            )
        except MeetscoreError as e:
            _fail(str(e))
    _emit_reports(reports, list(hyp_roots), as_json, as_csv, output_dir, render_score_text)


@main.command("score-diar")
@click.option("--der-collar", type=CollarType(), default=DEFAULT_DER_COLLAR, show_default=True,
              help="No-score collar around reference boundaries, seconds.")
@click.option("--no-overlap-scoring", is_flag=True,
              help="Exclude overlapped reference speech from scoring.")
@_with_common
def cmd_score_diar(ref_root, hyp_roots, split, der_collar, no_overlap_scoring,
                   norm_config, pre_normalized, allow_missing, jobs, as_json,
                   as_csv, output_dir):
    """Score diarization quality: DER components and speaker counting."""
    if len(hyp_roots) > MAX_HYPOTHESES:
        _fail(f"at most {MAX_HYPOTHESES} hypothesis sets per invocation")
    reports = []
    for hyp_root in hyp_roots:
        try:
            reports.append(
                build_diar_report(
                    ref_root, hyp_root, split=split, der_collar=der_collar,
                    score_overlap=not no_overlap_scoring, norm_config=norm_config,
                    pre_normalized=pre_normalized, allow_missing=allow_missing,
                    jobs=jobs,
                )
            )
        except MeetscoreError as e:
            _fail(str(e))
    _emit_reports(reports, list(hyp_roots), as_json, as_csv, output_dir, render_score_text)


if __name__ == "__main__":
    main()
