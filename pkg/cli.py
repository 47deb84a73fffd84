"""
Command-line interface
Интерфейс командной строки

Exit codes: 0 success, 1 a check failed, 2 usage or format error.
"""

import functools
import json
import logging
import os
import sys
from typing import Any, Dict, List, Optional, Tuple

import click

from chart import Chart, chart_from_dict, chart_type, check_document, measures, save_chart, validate
from config import CatalogConfig, LoggingConfig, SearchConfig
from domains import (angled_disks, detect_lenses, detect_m4_disks, io_balance,
                     io_scenarios, make_domain)
from errors import ChartFormatError, ChartkitError, DomainPreconditionError
from moves import apply_move_tracked, enumerate_moves, load_script, replay_script
from render import save_svg
from search import enumerate_skeletons, reduce, ShapeLevels
from sketch import Sketch, load_sketch_doc
from structure import CHAIN_KINDS, detect_patterns, find_loops, label_subgraph, load_catalog

logger = logging.getLogger(__name__)

# A loop in Gamma_m at this complexity is worth a warning
LOOP_REPORT_WHITE = 7


def _read(path: str) -> Tuple[Chart, Optional[Sketch]]:
    """Chart from a canonical chart file or a sketch document"""
    try:
        with open(path, 'r', encoding='utf-8') as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise ChartFormatError(f"cannot read {path}: {e}") from e
    if not isinstance(doc, dict):
        raise ChartFormatError(f"{path} does not hold a JSON object")
    if doc.get('format') == 'sketch':
        sketch = load_sketch_doc(doc, name=path)
        return sketch.chart, sketch
    report = check_document(doc)
    if not report.is_valid:
        raise ChartFormatError(f"{path} is not a combinatorial map: {sorted(report.codes)}")
    return chart_from_dict(doc), None


def _emit(payload: Dict[str, Any], lines: List[str]):
    ctx = click.get_current_context()
    if ctx.find_root().obj.get('format') == 'json':
        click.echo(json.dumps(payload, indent=2, sort_keys=True))
    else:
        click.echo('\n'.join(lines))


def guarded(command):
    """Map toolkit errors to exit codes at the outer edge"""
    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except ChartkitError as e:
            logger.error(f"{type(e).__name__}: {str(e)}")
            sys.exit(e.exit_code)
    return wrapper


@click.group()
@click.option('--format', 'output_format', type=click.Choice(['text', 'json']), default='text',
              help='Report format')
@click.option('--log-level', default=None, help='Overrides CHARTKIT_LOG_LEVEL')
@click.pass_context
def cli(ctx, output_format, log_level):
    """Braid chart toolkit"""
    logging.basicConfig(level=(log_level or LoggingConfig.LEVEL).upper(), format=LoggingConfig.FORMAT,
                        stream=sys.stderr)
    ctx.ensure_object(dict)
    ctx.obj['format'] = output_format


@cli.command('validate')
@click.argument('path', type=click.Path(exists=True, dir_okay=False))
@click.option('--strict', is_flag=True, help='Also check the structural assumptions')
@guarded
def validate_command(path, strict):
    """Check the chart axioms"""
    chart, _ = _read(path)
    report = validate(chart, strict=strict)
    payload = {'path': path, 'report': report.to_dict()}
    lines = [f"{path}: {'valid' if report.is_valid else 'INVALID'}"]
    if report.is_valid:
        ctype = chart_type(chart)
        payload['measures'] = measures(chart).to_dict()
        payload['type'] = str(ctype) if ctype else 'untyped'
        m = measures(chart)
        lines.append(f"  w={m.w} f={m.f} c={m.c} b={m.b} type={payload['type']}")
    for violation in report.violations:
        lines.append(f"  {violation.code}: {violation.message}")
    _emit(payload, lines)
    if not report.is_valid:
        sys.exit(1)


@cli.command('analyze')
@click.argument('path', type=click.Path(exists=True, dir_okay=False))
@click.option('--label', 'm', type=int, required=True, help='Label m of the subgraph Gamma_m')
@guarded
def analyze_command(path, m):
    """Chains, angled disks and feelers of Gamma_m"""
    chart, _ = _read(path)
    sub = label_subgraph(chart, m)
    disks = angled_disks(chart, m)
    ctype = chart_type(chart)
    chains = {kind: len(sub.by_kind(kind)) for kind in CHAIN_KINDS}
    payload = {
        'label': m,
        'type': str(ctype) if ctype else 'untyped',
        'measures': measures(chart).to_dict(),
        'whites': list(sub.whites),
        'blacks': list(sub.blacks),
        'chains': chains,
        'angled_disks': [d.to_dict() for d in disks],
    }
    lines = [f"Gamma_{m}: {len(sub.whites)} white, {len(sub.blacks)} black",
             '  chains: ' + ', '.join(f"{kind}={count}" for kind, count in chains.items() if count)]
    for disk in disks:
        flag = ' special' if disk.special else ''
        where = ' (contains infinity)' if disk.domain.contains_infinity else ''
        lines.append(f"  {disk.k}-angled disk{flag} through {list(disk.whites)}, "
                     f"{len(disk.feelers)} feelers{where}")
    _emit(payload, lines)


@cli.group('moves')
def moves_group():
    """Enumerate, apply and replay C-moves"""


@moves_group.command('list')
@click.argument('path', type=click.Path(exists=True, dir_okay=False))
@click.option('--kind', 'kinds', multiple=True, help='Move type such as CIII or CII:backward')
@guarded
def moves_list(path, kinds):
    chart, _ = _read(path)
    instances = enumerate_moves(chart, list(kinds) or None)
    _emit({'moves': [mv.to_dict() for mv in instances]},
          [f"{i:4d}  {mv}" for i, mv in enumerate(instances)] or ['no applicable moves'])


@moves_group.command('apply')
@click.argument('path', type=click.Path(exists=True, dir_okay=False))
@click.option('--index', type=int, required=True, help='Position in the listing of `moves list`')
@click.option('--kind', 'kinds', multiple=True, help='Same filter as for `moves list`')
@click.option('-o', '--output', type=click.Path(dir_okay=False), required=True)
@guarded
def moves_apply(path, index, kinds, output):
    """Apply one listed move instance and save the result"""
    chart, _ = _read(path)
    instances = enumerate_moves(chart, list(kinds) or None)
    if not 0 <= index < len(instances):
        raise click.UsageError(f"index {index} out of range, {len(instances)} instances")
    mv = instances[index]
    result, _, delta = apply_move_tracked(chart, mv)
    save_chart(result, output)
    _emit({'move': mv.to_dict(), 'delta': delta, 'measures': measures(result).to_dict(), 'output': output},
          [f"{mv}: {delta} -> {output}"])


@moves_group.command('replay')
@click.argument('script', type=click.Path(exists=True, dir_okay=False))
@click.option('-o', '--output', type=click.Path(dir_okay=False), default=None)
@guarded
def moves_replay(script, output):
    """Replay a named move script and check its expected measures"""
    loaded = load_script(script)
    result = replay_script(loaded)
    got = measures(result.chart).to_dict()
    mismatches = {key: (value, got.get(key)) for key, value in loaded.expect.items() if got.get(key) != value}
    if output:
        save_chart(result.chart, output)
    payload = dict(result.to_dict(), script=loaded.name, expect=loaded.expect,
                   mismatches={k: list(v) for k, v in mismatches.items()})
    lines = [f"{step.index}: {step.kind} {step.direction} {step.delta}" for step in result.steps]
    lines.append(f"final w={got['w']} f={got['f']} c={got['c']}")
    lines += [f"expected {k}={want}, got {have}" for k, (want, have) in mismatches.items()]
    _emit(payload, lines)
    if mismatches:
        sys.exit(1)


def _all_faces(chart: Chart, k: int) -> Tuple[List[Dict[str, Any]], int]:
    reports, failures = [], 0
    fixed = range(len(chart.vertices))
    for region in sorted(set(chart.region_of_cycle)):
        domain = make_domain(chart, {region})
        try:
            balance = io_balance(chart, domain, k, fixed)
        except DomainPreconditionError as e:
            reports.append({'region': region, 'status': 'skipped', 'label': e.label})
            continue
        ok = balance.total == 0
        failures += not ok
        reports.append({'region': region, 'status': 'pass' if ok else 'fail', 'total': balance.total})
    return reports, failures


@cli.command('io-check')
@click.argument('path', required=False, type=click.Path(exists=True, dir_okay=False))
@click.option('--scenario', type=click.Path(exists=True, dir_okay=False), default=None,
              help='Scenario file, CHARTKIT_SCENARIOS by default')
@click.option('--label', 'k', type=int, default=None)
@click.option('--all-faces', is_flag=True, help='Check the balance of every face closure')
@click.option('--workers', type=int, default=None)
@guarded
def io_check_command(path, scenario, k, all_faces, workers):
    """IO balance on scenario regions or on every face"""
    if all_faces:
        if path is None or k is None:
            raise click.UsageError("--all-faces needs a chart and --label")
        chart, _ = _read(path)
        reports, failures = _all_faces(chart, k)
        _emit({'label': k, 'faces': reports, 'failures': failures},
              [f"region {r['region']}: {r['status']}" + (f" total={r['total']}" if 'total' in r else '')
               for r in reports])
        if failures:
            sys.exit(1)
        return

    sketch = None
    if path is not None:
        _, sketch = _read(path)
        if sketch is None:
            raise click.UsageError("scenario selectors need names; pass a sketch document")
    results = io_scenarios(scenario or CatalogConfig.SCENARIO_FILE, sketch=sketch, workers=workers)
    _emit({'scenarios': [r.to_dict() for r in results]},
          [f"{r.id}: {r.status} (claimed {r.claimed}, computed {r.computed})"
           + (f" {r.message}" if r.message and not r.passed else '') for r in results])
    if not all(r.passed for r in results):
        sys.exit(1)


@cli.command('detect')
@click.argument('path', type=click.Path(exists=True, dir_okay=False))
@click.option('--catalog', 'catalog_dir', type=click.Path(exists=True, file_okay=False), default=None)
@guarded
def detect_command(path, catalog_dir):
    """Catalog patterns, lenses, M4-disks and loops"""
    chart, _ = _read(path)
    catalog = load_catalog(catalog_dir or CatalogConfig.CATALOG_DIR)
    labels = sorted(set(chart.label(d) for d in range(chart.dart_count)))
    w = measures(chart).w
    payload: Dict[str, Any] = {'patterns': [], 'loops': [], 'm4': []}
    lines: List[str] = []
    for m in labels:
        sub = label_subgraph(chart, m)
        for match in detect_patterns(sub, catalog):
            payload['patterns'].append(dict(match.to_dict(), label=m))
            lines.append(f"Gamma_{m}: {match.pattern}")
        for chain in find_loops(sub):
            payload['loops'].append({'label': m, 'darts': list(chain.darts), 'flagged': w == LOOP_REPORT_WHITE})
            lines.append(f"Gamma_{m}: loop at dart {chain.darts[0]}")
            if w == LOOP_REPORT_WHITE:
                logger.warning(f"Loop in Gamma_{m} of a chart with w={w}")
        for disk in detect_m4_disks(chart, m):
            payload['m4'].append(disk.to_dict())
            lines.append(f"M4-disk of label {m} through {list(disk.whites)}")
    lenses = detect_lenses(chart)
    payload['lenses'] = [lens.to_dict() for lens in lenses]
    lines += [f"lens ({lens.m}, {lens.m + 1}) at {list(lens.whites)}: condition {lens.condition}"
              for lens in lenses]
    _emit(payload, lines or ['nothing detected'])


@cli.command('enumerate')
@click.option('--white', type=int, required=True, help='Largest number of white vertices')
@click.option('--no-loop', is_flag=True)
@click.option('--min-component-w', type=int, default=None)
@click.option('-o', '--output', type=click.Path(dir_okay=False), required=True)
@guarded
def enumerate_command(white, no_loop, min_component_w, output):
    """Skeleton classes for every white count up to --white"""
    catalog = load_catalog(CatalogConfig.CATALOG_DIR)
    levels = ShapeLevels()
    manifest = {'white': white, 'no_loop': no_loop, 'min_component_w': min_component_w, 'levels': []}
    lines = []
    for w in range(1, white + 1):
        classes = enumerate_skeletons(w, no_loop=no_loop, min_component_w=min_component_w,
                                      catalog=catalog, levels=levels)
        manifest['levels'].append({'white': w, 'count': len(classes), 'classes': [c.to_dict() for c in classes]})
        lines.append(f"w={w}: {len(classes)} classes")
    with open(output, 'w', encoding='utf-8') as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
    logger.info(f"Wrote {output}")
    _emit({'output': output, 'counts': {lvl['white']: lvl['count'] for lvl in manifest['levels']}}, lines)


@cli.command('reduce')
@click.argument('path', type=click.Path(exists=True, dir_okay=False))
@click.option('--max-states', type=int, default=SearchConfig.MAX_STATES)
@click.option('--max-depth', type=int, default=SearchConfig.MAX_DEPTH)
@click.option('--kind', 'kinds', multiple=True, help='Restrict the move types')
@click.option('--workers', type=int, default=None)
@click.option('--greedy', is_flag=True, help='Restart from each improvement instead of stopping at the first')
@click.option('-o', '--output', type=click.Path(dir_okay=False), required=True)
@guarded
def reduce_command(path, max_states, max_depth, kinds, workers, greedy, output):
    """Search for a complexity-lowering move sequence"""
    chart, _ = _read(path)
    report = validate(chart)
    if not report.is_valid:
        _emit({'report': report.to_dict()}, [f"{path} is not a valid chart: {sorted(report.codes)}"])
        sys.exit(1)
    outcome = reduce(chart, max_states=max_states, max_depth=max_depth, kinds=list(kinds) or None,
                     workers=workers, greedy=greedy)
    doc = outcome.to_dict()
    with open(output, 'w', encoding='utf-8') as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
    if doc['status'] == 'certificate':
        lines = [f"complexity {tuple(doc['before']['complexity'])} -> {tuple(doc['after']['complexity'])} "
                 f"in {len(doc['steps'])} moves -> {output}"]
    else:
        lines = [f"no improvement ({doc['reason']}, {doc['states']} states) -> {output}"]
    _emit({'output': output, 'status': doc['status']}, lines)


@cli.command('render')
@click.argument('path', type=click.Path(exists=True, dir_okay=False))
@click.option('-o', '--output', type=click.Path(dir_okay=False), required=True)
@guarded
def render_command(path, output):
    """Planar drawing as SVG"""
    chart, _ = _read(path)
    save_svg(chart, output)
    _emit({'output': output}, [f"wrote {os.path.abspath(output)}"])


def main():
    cli(obj={})


if __name__ == '__main__':
    main()
