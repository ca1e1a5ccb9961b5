//! DISH-p simulator: a shared control channel, `M` data channels, CCAP
//! windows for cooperative INV alarms, optional power saving.

pub mod ccap;
pub mod config;
pub mod engine;
pub mod frame;
pub mod metrics;
pub mod script;
pub mod table;
pub mod trace;

pub use ccap::{ccap_contention, AlarmReception, CcapDecision, CcapOutcome, Contender};
pub use config::{
    load_sim_config, AltruistPosition, ConfigError, Directive, DirectiveDoc, LoadError, Network, ScriptError,
    SimConfig, SimConfigDoc, SimDoc, Timing, Traffic, TrafficDoc,
};
pub use engine::{simulate, HandshakeRecord, SimOutput};
pub use frame::{Frame, FrameKind};
pub use metrics::{csv_header, csv_row, write_csv, MccEvent, Outcome, SimMetrics};
pub use script::{remark_counterexample, scripted_scenario, Phases, ScenarioScript, SCRIPT_SEED};
pub use table::{detect_mcc, ChannelUsageTable, InvIntent, UsageEntry};
pub use trace::{to_jsonl, TraceEvent, TraceKind};
