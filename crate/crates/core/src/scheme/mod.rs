//! Layered SIC / DPC transceiver plans for the wiretap and confidential
//! broadcast channels, and a Monte Carlo harness for them.

mod plan;
mod precoder;
mod simulate;

pub use plan::{
    build_broadcast_plan, build_dpc_plan, build_sic_plan, build_wiretap_plan, BroadcastPlan,
    DpcPlan, SicPlan, WiretapPlan, ZERO_STREAM_TOL,
};
pub use precoder::{select_precoder, PrecoderMode};
pub use simulate::{
    simulate_broadcast, simulate_dpc, simulate_leakage, simulate_sic, BroadcastSimulation,
    SimulationReport, StreamStats, BAND_FLOOR, BAND_SE, BLOCK, LEAKAGE_ABS_TOL, LEAKAGE_REL_TOL,
    SAMPLES_PER_DIM2,
};
