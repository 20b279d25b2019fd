"""myceliumsim: mycelium network growth, spike propagation, collision logic
and slow-voltage spike analysis, all deterministic under a fixed seed."""

from .capacity import DensitySpec, as_fraction, format_count, processor_count, rounded_processor_count
from .detection import (
    DetectedSpike,
    DetectorParams,
    SpikeStats,
    SpikeTrain,
    StimulusLatency,
    classify_trains,
    detect_spikes,
    detrend,
    spike_stats,
    stimulation_latency,
)
from .errors import (
    ArityError,
    ChronologyError,
    ConfigError,
    DimensionError,
    InfeasibleSpecError,
    MyceliumSimError,
    NotFoundError,
    ParseError,
    PortError,
    RangeError,
    UnsupportedNetworkError,
)
from .growth import GrowthParams, GrowthResult, electrical_prune, grow, grow_step
from .logic import (
    AbandonStrand,
    AddStrand,
    LengthenStrand,
    PortAssignment,
    SweepEntry,
    TruthTable,
    TruthTableResult,
    brute_force_oracle,
    apply_edit,
    classify_function,
    geometry_sweep,
    realize_truth_table,
)
from .manifest import RunManifest, build_manifest, load_manifest, verify_manifest, write_manifest
from .network import (
    MyceliumNetwork,
    Node,
    Strand,
    dump_network,
    load_network,
    parse_network,
    save_network,
)
from .propagation import (
    Arrival,
    ArrivalLog,
    ArrivalSummary,
    SimConfig,
    Spike,
    SpikeSimulation,
    estimate_runtime_stats,
)
from .recording import Recording, StimulusEvent, load_recording, load_stimuli, save_recording, save_stimuli
from .scenario import Injection, Scenario, load_scenario, save_scenario
from .substrate import SubstrateField, load_substrate, save_substrate
from .synth import SynthChannelSpec, SynthSpec, generate_synthetic, load_synth_spec

__version__ = "0.1.0"

__all__ = [
    "ArityError",
    "Arrival",
    "ArrivalLog",
    "ArrivalSummary",
    "AbandonStrand",
    "AddStrand",
    "ChronologyError",
    "ConfigError",
    "DensitySpec",
    "DetectedSpike",
    "DetectorParams",
    "DimensionError",
    "GrowthParams",
    "GrowthResult",
    "InfeasibleSpecError",
    "Injection",
    "LengthenStrand",
    "MyceliumNetwork",
    "MyceliumSimError",
    "Node",
    "NotFoundError",
    "ParseError",
    "PortAssignment",
    "PortError",
    "RangeError",
    "Recording",
    "RunManifest",
    "Scenario",
    "SimConfig",
    "Spike",
    "SpikeSimulation",
    "SpikeStats",
    "SpikeTrain",
    "StimulusEvent",
    "StimulusLatency",
    "Strand",
    "SubstrateField",
    "SweepEntry",
    "SynthChannelSpec",
    "SynthSpec",
    "TruthTable",
    "TruthTableResult",
    "UnsupportedNetworkError",
    "as_fraction",
    "brute_force_oracle",
    "apply_edit",
    "build_manifest",
    "classify_function",
    "classify_trains",
    "detect_spikes",
    "detrend",
    "dump_network",
    "electrical_prune",
    "format_count",
    "generate_synthetic",
    "geometry_sweep",
    "grow",
    "grow_step",
    "load_manifest",
    "load_network",
    "load_recording",
    "load_scenario",
    "load_stimuli",
    "load_substrate",
    "load_synth_spec",
    "parse_network",
    "processor_count",
    "realize_truth_table",
    "rounded_processor_count",
    "save_network",
    "save_recording",
    "save_scenario",
    "save_stimuli",
    "save_substrate",
    "spike_stats",
    "stimulation_latency",
    "estimate_runtime_stats",
    "verify_manifest",
    "write_manifest",
]
