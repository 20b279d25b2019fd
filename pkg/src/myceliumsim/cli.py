"""Command line interface.

Subcommands: grow, simulate, enumerate, analyze, synth, capacity. Every
artifact-writing subcommand drops a `<output>.manifest` sidecar with sha256
digests of its inputs and outputs. Exit codes: 0 success, 1 domain error
(bad input data, unsatisfiable request, missing file), 2 usage error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys

import numpy as np

from .capacity import DensitySpec, as_fraction, format_count, processor_count
from .detection import (
    DetectorParams,
    classify_trains,
    detect_spikes,
    spike_stats,
    stimulation_latency,
)
from .errors import ConfigError, MyceliumSimError, ParseError
from .growth import GrowthParams, grow
from .logic import PortAssignment, classify_function, realize_truth_table
from .manifest import build_manifest, write_manifest
from .network import MyceliumNetwork, load_network, save_network
from .propagation import COLLISION_RULES, SimConfig, SpikeSimulation, estimate_runtime_stats
from .recording import load_recording, save_recording
from .scenario import load_scenario
from .substrate import load_substrate
from .synth import generate_synthetic, load_synth_spec


def _info(args, message: str) -> None:
    if not args.quiet:
        print(message)


def _dataclass_from_json(cls, path):
    """Build a params dataclass from a flat JSON object, rejecting unknown keys."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"bad JSON: {exc}", path=str(path)) from exc
    if not isinstance(doc, dict):
        raise ParseError("expected a JSON object", path=str(path))
    known = {f.name for f in dataclasses.fields(cls)}
    unknown = sorted(set(doc) - known)
    if unknown:
        raise ParseError(f"unknown keys {unknown}; known: {sorted(known)}", path=str(path))
    try:
        return cls(**doc)
    except TypeError as exc:
        raise ParseError(str(exc), path=str(path)) from exc


def _parse_pair(text: str, what: str, sep: str = ":") -> tuple[str, str]:
    parts = text.split(sep)
    if len(parts) != 2:
        raise ConfigError(f"{what} must look like LO{sep}HI, got {text!r}")
    return parts[0], parts[1]


def _portable_path(path: str) -> str:
    """Relative form for manifest records when the file sits under the cwd.

    Scenario network paths come back absolute after resolution; recording
    them verbatim would bake the working directory into the manifest and
    break byte-identical reruns from different directories.
    """
    rel = os.path.relpath(path)
    return path if rel.startswith("..") else rel


def _seeded_inoculum(field, tips: int, origin: tuple[float, ...] | None) -> MyceliumNetwork:
    """Fruit-body hub with `tips` unit strands fanned out evenly."""
    if origin is None:
        origin = tuple(s / 2.0 for s in field.size_mm)
    net = MyceliumNetwork()
    hub = net.add_node(origin, "fruit-body")
    for k in range(tips):
        angle = 2.0 * math.pi * k / tips
        direction = (math.cos(angle), math.sin(angle)) + (0.0,) * (len(origin) - 2)
        pos = tuple(o + d for o, d in zip(origin, direction))
        tip = net.add_node(pos, "tip", direction=direction)
        net.add_strand(hub.id, tip.id)
    return net


def cmd_grow(args) -> int:
    field = load_substrate(args.field)
    params = _dataclass_from_json(GrowthParams, args.params) if args.params else GrowthParams()
    origin = tuple(float(x) for x in args.origin.split(",")) if args.origin else None
    net = _seeded_inoculum(field, args.tips, origin)
    net.validate(field)
    result = grow(net, field, params, np.random.default_rng(args.seed))
    result.network.seed = args.seed
    result.network.validate(field)
    save_network(result.network, args.out)
    inputs = [args.field] + ([args.params] if args.params else [])
    write_manifest(
        build_manifest(["myceliumsim", *args.argv], inputs, [args.out], seeds=[args.seed]),
        str(args.out) + ".manifest",
    )
    _info(
        args,
        f"grew {len(result.network.nodes)} nodes, {len(result.network.strands)} strands "
        f"({result.network.branch_count()} branch points) in {result.steps_run} steps; "
        f"stopped by {result.reason}; wrote {args.out}",
    )
    return 0


def cmd_simulate(args) -> int:
    scenario = load_scenario(args.scenario)
    network = scenario.load_network()
    sim = SpikeSimulation(network, scenario.config)
    for inj in scenario.injections:
        sim.inject_spike(inj.node_id, inj.time_s, inj.amplitude_mv)
    log = sim.run()
    log.write_csv(args.out)
    write_manifest(
        build_manifest(
            ["myceliumsim", *args.argv], [args.scenario, _portable_path(scenario.network_path)], [args.out]
        ),
        str(args.out) + ".manifest",
    )
    summary = estimate_runtime_stats(log)
    _info(
        args,
        f"{summary.count} arrivals"
        + (f", first {summary.first_s} s, last {summary.last_s} s" if summary.count else "")
        + f"; wrote {args.out}",
    )
    return 0


def cmd_enumerate(args) -> int:
    scenario = load_scenario(args.scenario)
    network = scenario.load_network()
    config = scenario.config
    if args.rule:
        config = dataclasses.replace(config, collision_rule=args.rule)
    lo, hi = _parse_pair(args.window, "--window")
    assignment = PortAssignment(
        inputs=tuple(int(tok) for tok in args.inputs.split(",")),
        output=args.output,
        amplitude_mv=args.amplitude,
        window=(float(lo), float(hi)),
    )
    result = realize_truth_table(network, assignment, config)
    lines = [
        "inputs " + ",".join(str(i) for i in assignment.inputs),
        f"output {assignment.output}",
        f"rule {config.collision_rule}",
        f"window {repr(assignment.window[0])}:{repr(assignment.window[1])}",
        f"reachable {'yes' if result.output_reachable else 'no'}",
        f"table {result.table.bitstring()}",
        f"function {classify_function(result.table)}",
    ]
    text = "\n".join(lines) + "\n"
    print(text, end="")
    outputs = []
    if args.vector_logs:
        os.makedirs(args.vector_logs, exist_ok=True)
        for i, log in enumerate(result.logs):
            p = os.path.join(args.vector_logs, f"vector_{i:0{max(1, len(result.logs) // 16)}d}.csv")
            log.write_csv(p)
            outputs.append(p)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        outputs.append(args.out)
    if outputs:
        write_manifest(
            build_manifest(
                ["myceliumsim", *args.argv], [args.scenario, _portable_path(scenario.network_path)], outputs
            ),
            str(outputs[-1]) + ".manifest",
        )
    return 0


def _write_stats(path, spikes, params) -> None:
    labels = sorted({sp.channel for sp in spikes})
    lines = []
    for label in labels:
        chan = [sp for sp in spikes if sp.channel == label]
        st = spike_stats(chan)
        lines.append(f"channel {label}")
        lines.append(f"count {st.count}")
        lines.append(f"amplitude_mean_mv {repr(st.amplitude_mean_mv)}")
        lines.append(f"amplitude_sigma_mv {repr(st.amplitude_sigma_mv)}")
        lines.append(f"width_mean_s {repr(st.width_mean_s)}")
        lines.append(f"width_sigma_s {repr(st.width_sigma_s)}")
        lines.append(f"period_mean_s {repr(st.period_mean_s) if st.period_mean_s is not None else '-'}")
        lines.append(f"period_sigma_s {repr(st.period_sigma_s) if st.period_sigma_s is not None else '-'}")
        wide = [sp for sp in chan if sp.width_s > params.wide_flag_s]
        lines.append(f"wide_count {len(wide)}")
        for sp in wide:
            lines.append(f"wide_spike onset_s {repr(sp.onset_s)} width_s {repr(sp.width_s)}")
        lines.append("")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines))


def cmd_analyze(args) -> int:
    params = _dataclass_from_json(DetectorParams, args.params) if args.params else DetectorParams()
    recording = load_recording(args.infile, stimulus_path=args.stim)
    spikes = detect_spikes(recording, params)
    os.makedirs(args.out, exist_ok=True)
    spikes_path = os.path.join(args.out, "spikes.csv")
    with open(spikes_path, "w", encoding="utf-8", newline="") as fh:
        fh.write("channel,onset_s,peak_s,amplitude_mV,width_s\n")
        for sp in spikes:
            fh.write(
                f"{sp.channel},{repr(sp.onset_s)},{repr(sp.peak_s)},{repr(sp.amplitude_mv)},{repr(sp.width_s)}\n"
            )
    stats_path = os.path.join(args.out, "stats.txt")
    _write_stats(stats_path, spikes, params)
    trains_path = os.path.join(args.out, "trains.txt")
    with open(trains_path, "w", encoding="utf-8") as fh:
        for train in classify_trains(spikes, params):
            fh.write(
                f"train {train.channel} {train.rate_class} count {len(train.spikes)} "
                f"period_mean_s {repr(train.period_mean_s)} onset_s {repr(train.spikes[0].onset_s)}\n"
            )
    outputs = [spikes_path, stats_path, trains_path]
    if recording.stimuli:
        latency_path = os.path.join(args.out, "latency.txt")
        with open(latency_path, "w", encoding="utf-8") as fh:
            for row in stimulation_latency(recording, spikes):
                fh.write(
                    f"stimulus {repr(row.stimulus.time_s)} {row.stimulus.kind} "
                    f"channel {row.channel} latency_s {repr(row.latency_s)}\n"
                )
        outputs.append(latency_path)
    inputs = [args.infile] + ([args.stim] if args.stim else []) + ([args.params] if args.params else [])
    write_manifest(
        build_manifest(["myceliumsim", *args.argv], inputs, outputs),
        os.path.join(args.out, "analysis.manifest"),
    )
    _info(args, f"{len(spikes)} spikes across {len(recording.labels)} channels; wrote {args.out}")
    return 0


def cmd_synth(args) -> int:
    spec = load_synth_spec(args.spec)
    recording, truth = generate_synthetic(spec, args.seed)
    save_recording(recording, args.out)
    truth_path = args.truth_out or str(args.out) + ".truth.csv"
    with open(truth_path, "w", encoding="utf-8", newline="") as fh:
        fh.write("channel,onset_s,peak_s,amplitude_mV,width_s\n")
        for sp in truth:
            fh.write(
                f"{sp.channel},{repr(sp.onset_s)},{repr(sp.peak_s)},{repr(sp.amplitude_mv)},{repr(sp.width_s)}\n"
            )
    write_manifest(
        build_manifest(["myceliumsim", *args.argv], [args.spec], [args.out, truth_path], seeds=[args.seed]),
        str(args.out) + ".manifest",
    )
    _info(args, f"{len(truth)} spikes over {recording.duration_s} s; wrote {args.out}")
    return 0


def cmd_capacity(args) -> int:
    tips_lo, tips_hi = _parse_pair(args.tips, "--tips")
    vol_lo, vol_hi = _parse_pair(args.per_mm3, "--per-mm3")
    spec = DensitySpec(
        tips_min=as_fraction(tips_lo),
        tips_max=as_fraction(tips_hi),
        per_volume_mm3_min=as_fraction(vol_lo),
        per_volume_mm3_max=as_fraction(vol_hi),
        volume_m3=as_fraction(args.volume_m3),
        junctions_per_tip=as_fraction(args.junctions_per_tip),
    )
    low, high = processor_count(spec)
    text = f"processors_min {format_count(low)}\nprocessors_max {format_count(high)}\n"
    print(text, end="")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        write_manifest(
            build_manifest(["myceliumsim", *args.argv], [], [args.out]),
            str(args.out) + ".manifest",
        )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="myceliumsim",
        description="Grow mycelium networks, propagate voltage spikes, enumerate collision logic, "
        "and analyze slow electrical recordings.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--quiet", action="store_true", help="suppress informational output")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("grow", parents=[common], help="grow a network on a substrate field")
    p.add_argument("--field", required=True, help="substrate file")
    p.add_argument("--params", help="growth params JSON")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output network file")
    p.add_argument("--tips", type=int, default=3, help="initial tip count (default 3)")
    p.add_argument("--origin", help="inoculum position 'x,y[,z]' (default: field center)")
    p.set_defaults(func=cmd_grow)

    p = sub.add_parser("simulate", parents=[common], help="run a spike scenario")
    p.add_argument("--scenario", required=True)
    p.add_argument("--out", required=True, help="arrival log CSV")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("enumerate", parents=[common], help="enumerate a truth table")
    p.add_argument("--scenario", required=True, help="supplies the network and base config")
    p.add_argument("--inputs", required=True, help="comma-separated fruit-body node ids")
    p.add_argument("--output", type=int, required=True, help="terminal readout node id")
    p.add_argument("--window", default="0:600", help="readout window LO:HI seconds")
    p.add_argument("--rule", choices=COLLISION_RULES, help="override the scenario collision rule")
    p.add_argument("--amplitude", type=float, default=1.0)
    p.add_argument("--out", help="also write the table to this file")
    p.add_argument("--vector-logs", help="directory for per-vector arrival CSVs")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("analyze", parents=[common], help="detect and characterize spikes")
    p.add_argument("--in", dest="infile", required=True, help="recording CSV")
    p.add_argument("--stim", help="stimulus sidecar CSV")
    p.add_argument("--params", help="detector params JSON")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("synth", parents=[common], help="generate a synthetic recording")
    p.add_argument("--spec", required=True, help="synth spec JSON")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="recording CSV")
    p.add_argument("--truth-out", help="ground-truth spikes CSV (default <out>.truth.csv)")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("capacity", parents=[common], help="processing-element capacity bounds")
    p.add_argument("--tips", required=True, help="tip count range MIN:MAX")
    p.add_argument("--per-mm3", required=True, help="sample volume range MIN:MAX in mm^3")
    p.add_argument("--volume-m3", required=True, help="target volume in m^3")
    p.add_argument("--junctions-per-tip", default="1", help="processing elements per tip (default 1)")
    p.add_argument("--out", help="also write the result to this file")
    p.set_defaults(func=cmd_capacity)
    return parser


def cli_dispatch(argv=None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    args.argv = list(argv)
    try:
        return args.func(args)
    except (MyceliumSimError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli_dispatch())
