//! Monte Carlo estimation of hitting probabilities for the sampled heat field.

mod estimate;
mod field;
mod hitting;

pub use estimate::Estimate;
pub use field::{FieldSample, FieldSampler, SampleGrid, MAX_GRID_POINTS};
pub use hitting::{
    estimate_hit_prob, fit_small_ball, grid_modulus, hit_indicator, hit_prob_ladder, min_distances,
    small_ball_slope, HitEstimate, InflationPolicy, SmallBallFit, MIN_SAMPLES,
};
