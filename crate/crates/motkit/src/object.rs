//! Unified object model: tracked objects, object lists, and detections.
//!
//! Every tracked road user carries a 6-D kinematic state [px, py, vx, vy,
//! theta, omega] with covariance, a bounding-box dimension vector with
//! covariance, an existence probability, a class probability vector over
//! seven classes, and a time-stamped history. Partial-state tracking is
//! expressed through [`StateMask`]; unmodeled components are never read by
//! library operations.

use crate::angles::wrap_angle;
use crate::error::{Error, Result};
use nalgebra::{Matrix3, Matrix6, Vector2, Vector6};
use serde::{Deserialize, Serialize};

pub const STATE_DIM: usize = 6;
pub const DIMS_DIM: usize = 3;
pub const NUM_CLASSES: usize = 7;

/// Default object classes. `Other` encodes the absence of a classification
/// result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectClass {
    Car,
    Truck,
    Motorcycle,
    Bicycle,
    Pedestrian,
    Stationary,
    Other,
}

impl ObjectClass {
    pub const ALL: [ObjectClass; NUM_CLASSES] = [
        ObjectClass::Car,
        ObjectClass::Truck,
        ObjectClass::Motorcycle,
        ObjectClass::Bicycle,
        ObjectClass::Pedestrian,
        ObjectClass::Stationary,
        ObjectClass::Other,
    ];

    pub fn index(self) -> usize {
        Self::ALL.iter().position(|c| *c == self).unwrap()
    }
}

/// Kinematic state: position (m), velocity (m/s), yaw (deg, in [0, 360)),
/// and yaw rate (deg/s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateVector {
    pub px: f64,
    pub py: f64,
    pub vx: f64,
    pub vy: f64,
    pub theta: f64,
    pub omega: f64,
}

impl StateVector {
    pub fn new(px: f64, py: f64, vx: f64, vy: f64, theta: f64, omega: f64) -> Result<Self> {
        for (v, name) in [
            (px, "px"),
            (py, "py"),
            (vx, "vx"),
            (vy, "vy"),
            (omega, "omega"),
        ] {
            if !v.is_finite() {
                return Err(Error::NonFinite(name));
            }
        }
        Ok(Self {
            px,
            py,
            vx,
            vy,
            theta: wrap_angle(theta)?,
            omega,
        })
    }

    pub fn zeros() -> Self {
        Self {
            px: 0.0,
            py: 0.0,
            vx: 0.0,
            vy: 0.0,
            theta: 0.0,
            omega: 0.0,
        }
    }

    pub fn position(&self) -> Vector2<f64> {
        Vector2::new(self.px, self.py)
    }

    /// Component order [px, py, vx, vy, theta, omega], matching covariance
    /// row/column order everywhere in the toolkit.
    pub fn to_vector(&self) -> Vector6<f64> {
        Vector6::new(self.px, self.py, self.vx, self.vy, self.theta, self.omega)
    }

    /// Builds a state from a raw vector, wrapping yaw into [0, 360).
    pub fn from_vector(v: &Vector6<f64>) -> Result<Self> {
        Self::new(v[0], v[1], v[2], v[3], v[4], v[5])
    }

    pub fn is_finite(&self) -> bool {
        self.to_vector().iter().all(|v| v.is_finite())
    }
}

/// Bounding-box dimensions in meters. Serialized record order is [w, l, h].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionVector {
    pub length: f64,
    pub width: f64,
    pub height: f64,
}

impl DimensionVector {
    pub fn new(length: f64, width: f64, height: f64) -> Self {
        Self {
            length,
            width,
            height,
        }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.length, self.width, self.height]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }
}

/// Probability vector over the seven default classes, summing to one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassVector(pub [f64; NUM_CLASSES]);

impl ClassVector {
    /// Normalizes nonnegative class weights into a probability vector.
    pub fn from_weights(raw: [f64; NUM_CLASSES]) -> Result<Self> {
        let mut sum = 0.0;
        for w in raw {
            if !w.is_finite() || w < 0.0 {
                return Err(Error::OutOfRange {
                    name: "class weight",
                    value: w,
                    range: "[0, inf)",
                });
            }
            sum += w;
        }
        if sum <= 0.0 {
            return Err(Error::DegenerateClassEvidence);
        }
        let mut out = raw;
        for v in out.iter_mut() {
            *v /= sum;
        }
        Ok(Self(out))
    }

    /// A fresh, unclassified object: all mass on `Other`.
    pub fn unclassified() -> Self {
        let mut c = [0.0; NUM_CLASSES];
        c[ObjectClass::Other.index()] = 1.0;
        Self(c)
    }

    pub fn uniform() -> Self {
        Self([1.0 / NUM_CLASSES as f64; NUM_CLASSES])
    }

    /// One-hot vector for a single class.
    pub fn one_hot(class: ObjectClass) -> Self {
        let mut c = [0.0; NUM_CLASSES];
        c[class.index()] = 1.0;
        Self(c)
    }

    pub fn get(&self, class: ObjectClass) -> f64 {
        self.0[class.index()]
    }

    pub fn argmax(&self) -> ObjectClass {
        let mut best = 0;
        for i in 1..NUM_CLASSES {
            if self.0[i] > self.0[best] {
                best = i;
            }
        }
        ObjectClass::ALL[best]
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }
}

/// Modeled/observed flags per state component (6) and dimension component (3).
///
/// Position, length, and width form the minimum representation and are always
/// set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateMask {
    pub state: [bool; STATE_DIM],
    pub dims: [bool; DIMS_DIM],
}

impl StateMask {
    pub fn new(state: [bool; STATE_DIM], dims: [bool; DIMS_DIM]) -> Result<Self> {
        if !(state[0] && state[1] && dims[0] && dims[1]) {
            return Err(Error::MissingComponents(
                "position, length, and width must always be modeled",
            ));
        }
        Ok(Self { state, dims })
    }

    /// All components modeled.
    pub fn full() -> Self {
        Self {
            state: [true; STATE_DIM],
            dims: [true; DIMS_DIM],
        }
    }

    /// Position-only kinematics (velocity, yaw, and yaw rate unobserved).
    pub fn position_only() -> Self {
        Self {
            state: [true, true, false, false, false, false],
            dims: [true, true, false],
        }
    }

    /// Indices of modeled state components, ascending.
    pub fn state_indices(&self) -> Vec<usize> {
        (0..STATE_DIM).filter(|&i| self.state[i]).collect()
    }

    /// Intersection of two masks (components modeled/observed in both).
    pub fn intersect(&self, other: &StateMask) -> StateMask {
        let mut state = [false; STATE_DIM];
        let mut dims = [false; DIMS_DIM];
        for i in 0..STATE_DIM {
            state[i] = self.state[i] && other.state[i];
        }
        for i in 0..DIMS_DIM {
            dims[i] = self.dims[i] && other.dims[i];
        }
        StateMask { state, dims }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrackStatus {
    Tentative,
    Confirmed,
}

/// One history snapshot: cycle time, state at that time, and whether the
/// object was associated with at least one detection in that cycle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistoryEntry {
    pub t: f64,
    pub state: StateVector,
    pub associated: bool,
}

/// Per-motion-model storage for terms outside the public 6-D state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelState {
    /// Cartesian acceleration carried by the linear constant-acceleration
    /// model.
    CartesianAccel { ax: f64, ay: f64 },
    /// Longitudinal acceleration carried by the turning
    /// constant-acceleration model.
    TangentialAccel { a: f64 },
}

/// One tracked road user.
#[derive(Debug, Clone)]
pub struct Object {
    pub id: u64,
    pub state: StateVector,
    pub state_cov: Matrix6<f64>,
    pub dims: DimensionVector,
    pub dims_cov: Matrix3<f64>,
    pub existence: f64,
    pub classes: ClassVector,
    pub status: TrackStatus,
    pub mask: StateMask,
    pub history: Vec<HistoryEntry>,
    /// Cycle time of the most recent cycle with an associated detection.
    pub last_associated: f64,
    /// Newest sensor timestamp fused into this object, for latency
    /// accounting downstream.
    pub sensor_t: Option<f64>,
    pub model_state: Option<ModelState>,
}

impl Object {
    /// Checks the cycle-boundary invariants: normalized classes, existence in
    /// [0, 1], wrapped yaw, symmetric covariances, PSD on the modeled block,
    /// strictly increasing history timestamps.
    pub fn validate(&self) -> Result<()> {
        if !self.state.is_finite() {
            return Err(Error::NonFinite("object state"));
        }
        if !(0.0..=1.0).contains(&self.existence) {
            return Err(Error::OutOfRange {
                name: "existence",
                value: self.existence,
                range: "[0, 1]",
            });
        }
        if (self.classes.sum() - 1.0).abs() > 1e-9 {
            return Err(Error::OutOfRange {
                name: "class sum",
                value: self.classes.sum(),
                range: "1 +/- 1e-9",
            });
        }
        if !(0.0..360.0).contains(&self.state.theta) {
            return Err(Error::OutOfRange {
                name: "theta",
                value: self.state.theta,
                range: "[0, 360)",
            });
        }
        check_symmetric(&self.state_cov, 1e-9)?;
        check_psd_masked(&self.state_cov, &self.mask.state)?;
        for w in self.history.windows(2) {
            if w[1].t <= w[0].t {
                return Err(Error::NonMonotoneTime {
                    now: w[1].t,
                    previous: w[0].t,
                });
            }
        }
        Ok(())
    }
}

/// An object-level measurement produced by one sensor path.
#[derive(Debug, Clone)]
pub struct Detection {
    pub source_id: String,
    /// Seconds on the shared monotone reference clock.
    pub sensor_timestamp: f64,
    /// Only components flagged in `mask.state` are meaningful.
    pub state: StateVector,
    pub meas_cov: Matrix6<f64>,
    pub dims: DimensionVector,
    pub dims_cov: Matrix3<f64>,
    pub mask: StateMask,
    pub class_hint: Option<ClassVector>,
}

/// All tracked objects at one time step.
#[derive(Debug, Clone)]
pub struct ObjectList {
    pub timestamp: f64,
    pub objects: Vec<Object>,
}

impl ObjectList {
    pub fn new(timestamp: f64, objects: Vec<Object>) -> Result<Self> {
        let mut ids: Vec<u64> = objects.iter().map(|o| o.id).collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidConfig(
                "duplicate object ids in list".to_string(),
            ));
        }
        Ok(Self { timestamp, objects })
    }
}

fn check_symmetric(m: &Matrix6<f64>, tol: f64) -> Result<()> {
    for i in 0..STATE_DIM {
        for j in (i + 1)..STATE_DIM {
            if (m[(i, j)] - m[(j, i)]).abs() > tol {
                return Err(Error::OutOfRange {
                    name: "covariance asymmetry",
                    value: (m[(i, j)] - m[(j, i)]).abs(),
                    range: "<= 1e-9",
                });
            }
        }
    }
    Ok(())
}

fn check_psd_masked(m: &Matrix6<f64>, mask: &[bool; STATE_DIM]) -> Result<()> {
    let idx: Vec<usize> = (0..STATE_DIM).filter(|&i| mask[i]).collect();
    let n = idx.len();
    let sub = nalgebra::DMatrix::from_fn(n, n, |r, c| m[(idx[r], idx[c])]);
    let sym = nalgebra::DMatrix::from_fn(n, n, |r, c| 0.5 * (sub[(r, c)] + sub[(c, r)]));
    let eig = sym.symmetric_eigenvalues();
    if eig.iter().any(|&l| l < -1e-9) {
        return Err(Error::OutOfRange {
            name: "covariance eigenvalue",
            value: eig.iter().cloned().fold(f64::INFINITY, f64::min),
            range: ">= -1e-9",
        });
    }
    Ok(())
}
