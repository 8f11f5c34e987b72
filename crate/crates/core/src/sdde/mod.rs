//! Fixed-step simulation of the state-dependent delay equation, with dense
//! output, extremum detection and tail statistics.

mod analysis;
mod history;
mod trajectory;

pub use analysis::{
    classify_behaviour, find_extrema, tail_amplitude, Behaviour, ExtremumKind, ExtremumRecord,
    EXTREMUM_TIME_TOL, SUSTAINED_SWING_RATIO,
};
pub use history::{HistoryFunction, HistoryTable};
pub use trajectory::{default_step, integrate, rhs, state_envelope, Segment, Trajectory};
