//! Time-indexed first-layer weight snapshots, shared by the trainer and the
//! flow integrators.

use ndarray::Array2;

/// Provenance and bookkeeping carried alongside the snapshots.
#[derive(Debug, Clone, Default)]
pub struct TrajectoryMeta {
    /// Learning rate / flow timescale that defined the time axis.
    pub tau: f64,
    /// Total number of update steps taken.
    pub steps: usize,
    /// Free-form description of the producing configuration.
    pub provenance: String,
    /// Number of amplifier-argument clamps observed (flow integrations only).
    pub clamp_events: usize,
}

/// A sequence of `M x N` first-layer weight matrices at strictly increasing
/// times (`step * tau` for training, integration time for flows).
#[derive(Debug, Clone)]
pub struct WeightTrajectory {
    pub times: Vec<f64>,
    pub weights: Vec<Array2<f64>>,
    pub meta: TrajectoryMeta,
}

impl WeightTrajectory {
    pub fn new(meta: TrajectoryMeta) -> Self {
        WeightTrajectory { times: Vec::new(), weights: Vec::new(), meta }
    }

    /// Append a snapshot, enforcing the shape and time-ordering invariants.
    pub fn push(&mut self, time: f64, weights: Array2<f64>) {
        if let Some(last) = self.times.last() {
            assert!(time > *last, "snapshot times must be strictly increasing");
        }
        if let Some(first) = self.weights.first() {
            assert_eq!(first.dim(), weights.dim(), "all snapshots share one shape");
        }
        self.times.push(time);
        self.weights.push(weights);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_weights(&self) -> &Array2<f64> {
        self.weights.last().expect("trajectory holds at least one snapshot")
    }

    /// Row `unit` of the final snapshot as a plain vector.
    pub fn final_unit(&self, unit: usize) -> Vec<f64> {
        self.final_weights().row(unit).to_vec()
    }
}
