//! Potential theory on target sets: kernels, capacities and Hausdorff-type sums.

mod capacity;
mod hausdorff;
mod kernel;
mod target;

pub use capacity::{
    capacity, cell_self_energy, minimize_energy, CapacityOptions, CapacityResult, GridMeasure,
};
pub use hausdorff::{hausdorff_upper, HausdorffPoint};
pub use kernel::PotentialKernel;
pub use target::{Cell, TargetSet};

pub(crate) fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}
