//! Prediction step: six motion models behind one interface.
//!
//! Linear models (no-prediction, random walk, constant velocity, constant
//! acceleration) expose their transition matrix; the turning models (constant
//! turn rate and velocity / and acceleration) use exact nonlinear transitions
//! with analytic Jacobians for covariance propagation. Process noise follows
//! the piecewise-constant integrated-white-noise discretization.

use crate::angles::{wrap_angle, DEG_TO_RAD, RAD_TO_DEG};
use crate::error::{Error, Result};
use crate::object::{ModelState, Object, StateVector};
use nalgebra::{DMatrix, DVector, Matrix6, Vector6};
use serde::{Deserialize, Serialize};

/// Yaw rate magnitude (deg/s) below which the turning models fall back to
/// their straight-line limit; the closed-form arc divides by omega.
const OMEGA_EPS_DEG: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MotionModelKind {
    NoPrediction,
    RandomWalk,
    ConstantVelocity,
    ExtendedConstantVelocity,
    ConstantAcceleration,
    ExtendedConstantAcceleration,
}

impl MotionModelKind {
    pub fn is_linear(self) -> bool {
        !matches!(
            self,
            MotionModelKind::ExtendedConstantVelocity
                | MotionModelKind::ExtendedConstantAcceleration
        )
    }

    fn name(self) -> &'static str {
        match self {
            MotionModelKind::NoPrediction => "no_prediction",
            MotionModelKind::RandomWalk => "random_walk",
            MotionModelKind::ConstantVelocity => "constant_velocity",
            MotionModelKind::ExtendedConstantVelocity => "extended_constant_velocity",
            MotionModelKind::ConstantAcceleration => "constant_acceleration",
            MotionModelKind::ExtendedConstantAcceleration => "extended_constant_acceleration",
        }
    }
}

/// Continuous noise intensities, SI units.
///
/// `accel_psd` drives position/velocity noise for the constant-velocity
/// family ((m/s^2)^2), `jerk_psd` for the constant-acceleration family
/// ((m/s^3)^2), `yaw_accel_psd` the yaw/yaw-rate noise of the turning models
/// ((deg/s^2)^2). Random walk reads `accel_psd` as a position diffusion rate
/// (m^2/s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProcessNoiseConfig {
    #[serde(default)]
    pub accel_psd: f64,
    #[serde(default)]
    pub jerk_psd: f64,
    #[serde(default)]
    pub yaw_accel_psd: f64,
}

impl Default for ProcessNoiseConfig {
    fn default() -> Self {
        Self {
            accel_psd: 1.0,
            jerk_psd: 1.0,
            yaw_accel_psd: 10.0,
        }
    }
}

impl ProcessNoiseConfig {
    fn validate(&self) -> Result<()> {
        for q in [self.accel_psd, self.jerk_psd, self.yaw_accel_psd] {
            if q < 0.0 || !q.is_finite() {
                return Err(Error::NegativeNoiseIntensity(q));
            }
        }
        Ok(())
    }
}

/// Result of one prediction step.
#[derive(Debug, Clone)]
pub struct PredictionResult {
    pub state: StateVector,
    pub cov: Matrix6<f64>,
    pub model_state: Option<ModelState>,
}

/// Transition matrix of a linear model. The constant-acceleration model
/// returns its augmented 8x8 matrix over [px, py, vx, vy, theta, omega, ax,
/// ay]; the other linear models return 6x6.
pub fn transition_matrix(
    model: MotionModelKind,
    _state: &StateVector,
    dt: f64,
) -> Result<DMatrix<f64>> {
    if dt < 0.0 {
        return Err(Error::NegativeDt(dt));
    }
    match model {
        MotionModelKind::NoPrediction | MotionModelKind::RandomWalk => {
            Ok(DMatrix::identity(6, 6))
        }
        MotionModelKind::ConstantVelocity => {
            let mut f = DMatrix::identity(6, 6);
            f[(0, 2)] = dt;
            f[(1, 3)] = dt;
            Ok(f)
        }
        MotionModelKind::ConstantAcceleration => {
            let mut f = DMatrix::identity(8, 8);
            f[(0, 2)] = dt;
            f[(1, 3)] = dt;
            f[(0, 6)] = 0.5 * dt * dt;
            f[(1, 7)] = 0.5 * dt * dt;
            f[(2, 6)] = dt;
            f[(3, 7)] = dt;
            Ok(f)
        }
        m => Err(Error::NonlinearModel(m.name())),
    }
}

/// Process noise matrix Q(dt). Sized like the model's transition matrix
/// (8x8 augmented for constant acceleration, 6x6 otherwise).
pub fn process_noise(
    model: MotionModelKind,
    dt: f64,
    noise: &ProcessNoiseConfig,
) -> Result<DMatrix<f64>> {
    if dt < 0.0 {
        return Err(Error::NegativeDt(dt));
    }
    noise.validate()?;
    let dt2 = dt * dt;
    let dt3 = dt2 * dt;
    let dt4 = dt3 * dt;
    // piecewise-constant white acceleration, per axis over (p, v)
    let dwna = |q: f64, m: &mut DMatrix<f64>, p: usize, v: usize| {
        m[(p, p)] += q * dt4 / 4.0;
        m[(p, v)] += q * dt3 / 2.0;
        m[(v, p)] += q * dt3 / 2.0;
        m[(v, v)] += q * dt2;
    };
    match model {
        MotionModelKind::NoPrediction => Ok(DMatrix::zeros(6, 6)),
        MotionModelKind::RandomWalk => {
            let mut q = DMatrix::zeros(6, 6);
            q[(0, 0)] = noise.accel_psd * dt;
            q[(1, 1)] = noise.accel_psd * dt;
            Ok(q)
        }
        MotionModelKind::ConstantVelocity => {
            let mut q = DMatrix::zeros(6, 6);
            dwna(noise.accel_psd, &mut q, 0, 2);
            dwna(noise.accel_psd, &mut q, 1, 3);
            Ok(q)
        }
        MotionModelKind::ExtendedConstantVelocity => {
            let mut q = DMatrix::zeros(6, 6);
            dwna(noise.accel_psd, &mut q, 0, 2);
            dwna(noise.accel_psd, &mut q, 1, 3);
            dwna(noise.yaw_accel_psd, &mut q, 4, 5);
            Ok(q)
        }
        MotionModelKind::ConstantAcceleration => {
            // piecewise-constant white jerk over (p, v, a) per axis
            let g = [dt3 / 6.0, dt2 / 2.0, dt];
            let mut q = DMatrix::zeros(8, 8);
            for idx in [[0usize, 2, 6], [1usize, 3, 7]] {
                for r in 0..3 {
                    for c in 0..3 {
                        q[(idx[r], idx[c])] += noise.jerk_psd * g[r] * g[c];
                    }
                }
            }
            Ok(q)
        }
        MotionModelKind::ExtendedConstantAcceleration => {
            // jerk-driven (p, v) noise projected onto the 6-D state, plus
            // yaw-acceleration noise on (theta, omega)
            let gp = dt3 / 6.0;
            let gv = dt2 / 2.0;
            let mut q = DMatrix::zeros(6, 6);
            for (p, v) in [(0usize, 2usize), (1, 3)] {
                q[(p, p)] += noise.jerk_psd * gp * gp;
                q[(p, v)] += noise.jerk_psd * gp * gv;
                q[(v, p)] += noise.jerk_psd * gp * gv;
                q[(v, v)] += noise.jerk_psd * gv * gv;
            }
            dwna(noise.yaw_accel_psd, &mut q, 4, 5);
            Ok(q)
        }
    }
}

/// Optional known control input for linear models.
pub type ControlInput = (DMatrix<f64>, DVector<f64>);

/// Advances an object's kinematic state and covariance by `dt` seconds.
///
/// Dimensions, classification, and existence are held constant by default;
/// the pipeline applies custom predictors for those separately if configured.
pub fn predict(
    model: MotionModelKind,
    obj: &Object,
    dt: f64,
    noise: &ProcessNoiseConfig,
    control: Option<&ControlInput>,
) -> Result<PredictionResult> {
    if dt < 0.0 {
        return Err(Error::NegativeDt(dt));
    }
    if !obj.state.is_finite() {
        return Err(Error::NonFinite("object state"));
    }
    noise.validate()?;
    match model {
        MotionModelKind::ExtendedConstantVelocity => {
            let q = process_noise(model, dt, noise)?;
            let (x, jac) = ctrv_transition(&obj.state, 0.0, dt);
            let cov = propagate_cov(&jac, &obj.state_cov, &q);
            Ok(PredictionResult {
                state: StateVector::from_vector(&x)?,
                cov,
                model_state: obj.model_state,
            })
        }
        MotionModelKind::ExtendedConstantAcceleration => {
            let q = process_noise(model, dt, noise)?;
            let accel = match obj.model_state {
                Some(ModelState::TangentialAccel { a }) => a,
                _ => 0.0,
            };
            let (x, jac) = ctrv_transition(&obj.state, accel, dt);
            let cov = propagate_cov(&jac, &obj.state_cov, &q);
            Ok(PredictionResult {
                state: StateVector::from_vector(&x)?,
                cov,
                model_state: Some(ModelState::TangentialAccel { a: accel }),
            })
        }
        MotionModelKind::ConstantAcceleration => {
            let (ax, ay) = match obj.model_state {
                Some(ModelState::CartesianAccel { ax, ay }) => (ax, ay),
                _ => (0.0, 0.0),
            };
            let mut x = obj.state.to_vector();
            x[0] += x[2] * dt + 0.5 * ax * dt * dt;
            x[1] += x[3] * dt + 0.5 * ay * dt * dt;
            x[2] += ax * dt;
            x[3] += ay * dt;
            if let Some((b, u)) = control {
                x += project_control(b, u)?;
            }
            // acceleration carries zero tracked variance, so the 6-D
            // covariance propagates through the constant-velocity block
            let mut f = Matrix6::identity();
            f[(0, 2)] = dt;
            f[(1, 3)] = dt;
            let q8 = process_noise(model, dt, noise)?;
            let q6 = DMatrix::from_fn(6, 6, |i, j| q8[(i, j)]);
            let cov = propagate_cov(&f, &obj.state_cov, &q6);
            Ok(PredictionResult {
                state: StateVector::from_vector(&x)?,
                cov,
                model_state: Some(ModelState::CartesianAccel { ax, ay }),
            })
        }
        _ => {
            let fd = transition_matrix(model, &obj.state, dt)?;
            let f = Matrix6::from_fn(|i, j| fd[(i, j)]);
            let mut x = f * obj.state.to_vector();
            if let Some((b, u)) = control {
                x += project_control(b, u)?;
            }
            let q = process_noise(model, dt, noise)?;
            let cov = propagate_cov(&f, &obj.state_cov, &q);
            Ok(PredictionResult {
                state: StateVector::from_vector(&x)?,
                cov,
                model_state: obj.model_state,
            })
        }
    }
}

fn project_control(b: &DMatrix<f64>, u: &DVector<f64>) -> Result<Vector6<f64>> {
    if b.nrows() != 6 || b.ncols() != u.len() {
        return Err(Error::InvalidConfig(format!(
            "control input shape mismatch: B is {}x{}, u has {} entries",
            b.nrows(),
            b.ncols(),
            u.len()
        )));
    }
    let bu = b * u;
    Ok(Vector6::from_fn(|i, _| bu[i]))
}

fn propagate_cov(f: &Matrix6<f64>, p: &Matrix6<f64>, q: &DMatrix<f64>) -> Matrix6<f64> {
    let mut out = f * p * f.transpose();
    for i in 0..6 {
        for j in 0..6 {
            out[(i, j)] += q[(i, j)];
        }
    }
    // symmetrize to keep round-off from accumulating
    (out + out.transpose()) * 0.5
}

/// Exact constant-turn transition with longitudinal acceleration `accel`
/// (zero for the constant-velocity variant), plus its analytic Jacobian.
///
/// Operates on the Cartesian 6-D state; internally the velocity is projected
/// onto the heading (the turning models assume motion along the yaw
/// direction). Angles in the state are degrees; the returned yaw is wrapped
/// by the caller via `StateVector::from_vector`.
fn ctrv_transition(state: &StateVector, accel: f64, dt: f64) -> (Vector6<f64>, Matrix6<f64>) {
    let theta = state.theta * DEG_TO_RAD;
    let omega = state.omega * DEG_TO_RAD;
    let (sin0, cos0) = theta.sin_cos();
    // longitudinal speed: velocity projected onto the heading
    let v = state.vx * cos0 + state.vy * sin0;
    let dv_dvx = cos0;
    let dv_dvy = sin0;
    let dv_dth = -state.vx * sin0 + state.vy * cos0;

    let theta1 = theta + omega * dt;
    let (sin1, cos1) = theta1.sin_cos();
    let v1 = v + accel * dt;

    let straight = omega.abs() < OMEGA_EPS_DEG * DEG_TO_RAD;

    // position increments dx, dy and their partials w.r.t. (v, theta, omega)
    let (dx, dy, ddx_dv, ddx_dth, ddx_dom, ddy_dv, ddy_dth, ddy_dom);
    if straight {
        // second-order straight-line limit
        let s = v * dt + 0.5 * accel * dt * dt;
        dx = s * cos0;
        dy = s * sin0;
        ddx_dv = dt * cos0;
        ddy_dv = dt * sin0;
        ddx_dth = -s * sin0;
        ddy_dth = s * cos0;
        // limit of the arc partials as omega -> 0
        let m = 0.5 * v * dt * dt + accel * dt * dt * dt / 3.0;
        ddx_dom = -m * sin0;
        ddy_dom = m * cos0;
    } else {
        let a = (sin1 - sin0) / omega;
        let b = (cos0 - cos1) / omega;
        // second term integrates the linearly growing speed along the arc
        let c = (cos1 - cos0) / (omega * omega) + dt * sin1 / omega;
        let d = (sin1 - sin0) / (omega * omega) - dt * cos1 / omega;
        dx = v * a + accel * c;
        dy = v * b + accel * d;
        ddx_dv = a;
        ddy_dv = b;
        ddx_dth = v * (cos1 - cos0) / omega + accel * ((-sin1 + sin0) / (omega * omega) + dt * cos1 / omega);
        ddy_dth = v * (sin1 - sin0) / omega + accel * ((cos1 - cos0) / (omega * omega) + dt * sin1 / omega);
        let da_dom = (dt * cos1) / omega - a / omega;
        let db_dom = (dt * sin1) / omega - b / omega;
        let dc_dom = -2.0 * c / omega + dt * dt * cos1 / omega;
        let dd_dom = -2.0 * d / omega + dt * dt * sin1 / omega;
        ddx_dom = v * da_dom + accel * dc_dom;
        ddy_dom = v * db_dom + accel * dd_dom;
    }

    let mut x = Vector6::zeros();
    x[0] = state.px + dx;
    x[1] = state.py + dy;
    x[2] = v1 * cos1;
    x[3] = v1 * sin1;
    x[4] = (theta1 * RAD_TO_DEG).rem_euclid(360.0);
    x[5] = state.omega;

    // Jacobian in radian coordinates, rows/cols [px, py, vx, vy, theta, omega]
    let mut j = Matrix6::identity();
    j[(0, 2)] = ddx_dv * dv_dvx;
    j[(0, 3)] = ddx_dv * dv_dvy;
    j[(0, 4)] = ddx_dv * dv_dth + ddx_dth;
    j[(0, 5)] = ddx_dom;
    j[(1, 2)] = ddy_dv * dv_dvx;
    j[(1, 3)] = ddy_dv * dv_dvy;
    j[(1, 4)] = ddy_dv * dv_dth + ddy_dth;
    j[(1, 5)] = ddy_dom;
    // vx' = (v + a dt) cos(theta1)
    j[(2, 2)] = dv_dvx * cos1;
    j[(2, 3)] = dv_dvy * cos1;
    j[(2, 4)] = dv_dth * cos1 - v1 * sin1;
    j[(2, 5)] = -v1 * sin1 * dt;
    j[(3, 2)] = dv_dvx * sin1;
    j[(3, 3)] = dv_dvy * sin1;
    j[(3, 4)] = dv_dth * sin1 + v1 * cos1;
    j[(3, 5)] = v1 * cos1 * dt;
    j[(4, 4)] = 1.0;
    j[(4, 5)] = dt;

    // convert angle columns/rows between degrees (state) and radians (math)
    let mut jd = j;
    for col in [4usize, 5] {
        for row in 0..6 {
            jd[(row, col)] *= DEG_TO_RAD;
        }
    }
    for row in [4usize, 5] {
        for col in 0..6 {
            jd[(row, col)] *= RAD_TO_DEG;
        }
    }
    (x, jd)
}

/// Evaluates the turning-model transition only (no Jacobian), used by tests
/// for finite-difference validation.
pub fn turning_transition(state: &StateVector, accel: f64, dt: f64) -> Vector6<f64> {
    ctrv_transition(state, accel, dt).0
}

/// Analytic Jacobian of the turning-model transition, degree coordinates.
pub fn turning_jacobian(state: &StateVector, accel: f64, dt: f64) -> Matrix6<f64> {
    ctrv_transition(state, accel, dt).1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::object::{ClassVector, DimensionVector, StateMask, TrackStatus};
    use approx::assert_relative_eq;
    use nalgebra::Matrix3;

    fn obj_with(state: StateVector, cov: Matrix6<f64>) -> Object {
        Object {
            id: 0,
            state,
            state_cov: cov,
            dims: DimensionVector::new(4.5, 1.8, 1.5),
            dims_cov: Matrix3::identity(),
            existence: 0.5,
            classes: ClassVector::unclassified(),
            status: TrackStatus::Tentative,
            mask: StateMask::full(),
            history: Vec::new(),
            last_associated: 0.0,
            sensor_t: None,
            model_state: None,
        }
    }

    #[test]
    fn cv_transition_moves_position() {
        let s = StateVector::zeros();
        let f = transition_matrix(MotionModelKind::ConstantVelocity, &s, 0.5).unwrap();
        let x = Vector6::new(0.0, 0.0, 1.0, 2.0, 30.0, 5.0);
        let fx = Matrix6::from_fn(|i, j| f[(i, j)]) * x;
        assert_eq!(fx[0], 0.5);
        assert_eq!(fx[1], 1.0);
        assert_eq!(&fx.as_slice()[2..], &x.as_slice()[2..]);
    }

    #[test]
    fn random_walk_is_identity() {
        let s = StateVector::zeros();
        let f = transition_matrix(MotionModelKind::RandomWalk, &s, 3.0).unwrap();
        assert_eq!(f, DMatrix::identity(6, 6));
    }

    #[test]
    fn zero_horizon_is_identity_for_all_linear_models() {
        let s = StateVector::zeros();
        for m in [
            MotionModelKind::NoPrediction,
            MotionModelKind::RandomWalk,
            MotionModelKind::ConstantVelocity,
            MotionModelKind::ConstantAcceleration,
        ] {
            let f = transition_matrix(m, &s, 0.0).unwrap();
            let n = f.nrows();
            assert_eq!(f, DMatrix::identity(n, n), "{m:?}");
        }
    }

    #[test]
    fn extended_models_have_no_transition_matrix() {
        let s = StateVector::zeros();
        let err = transition_matrix(MotionModelKind::ExtendedConstantVelocity, &s, 0.1)
            .unwrap_err();
        assert!(err.to_string().contains("use predict"));
    }

    #[test]
    fn process_noise_zero_horizon_is_zero() {
        let cfg = ProcessNoiseConfig::default();
        for m in [
            MotionModelKind::NoPrediction,
            MotionModelKind::RandomWalk,
            MotionModelKind::ConstantVelocity,
            MotionModelKind::ExtendedConstantVelocity,
            MotionModelKind::ConstantAcceleration,
            MotionModelKind::ExtendedConstantAcceleration,
        ] {
            let q = process_noise(m, 0.0, &cfg).unwrap();
            assert_eq!(q.abs().max(), 0.0, "{m:?}");
        }
    }

    #[test]
    fn cv_noise_block_matches_integrated_white_acceleration() {
        // oracle: integrating piecewise-constant white acceleration over dt
        // gives gamma = [dt^2/2, dt]^T and Q = q * gamma gamma^T per axis
        let cfg = ProcessNoiseConfig {
            accel_psd: 1.0,
            ..Default::default()
        };
        let q = process_noise(MotionModelKind::ConstantVelocity, 1.0, &cfg).unwrap();
        assert_relative_eq!(q[(0, 0)], 0.25);
        assert_relative_eq!(q[(0, 2)], 0.5);
        assert_relative_eq!(q[(2, 0)], 0.5);
        assert_relative_eq!(q[(2, 2)], 1.0);
        assert_relative_eq!(q[(1, 1)], 0.25);
        assert_relative_eq!(q[(1, 3)], 0.5);
        assert_relative_eq!(q[(3, 3)], 1.0);
        assert_eq!(q[(4, 4)], 0.0);
    }

    #[test]
    fn process_noise_scales_linearly_with_intensity() {
        let c1 = ProcessNoiseConfig {
            accel_psd: 1.0,
            jerk_psd: 1.0,
            yaw_accel_psd: 1.0,
        };
        let c2 = ProcessNoiseConfig {
            accel_psd: 2.0,
            jerk_psd: 2.0,
            yaw_accel_psd: 2.0,
        };
        for m in [
            MotionModelKind::RandomWalk,
            MotionModelKind::ConstantVelocity,
            MotionModelKind::ExtendedConstantVelocity,
            MotionModelKind::ConstantAcceleration,
            MotionModelKind::ExtendedConstantAcceleration,
        ] {
            let q1 = process_noise(m, 0.7, &c1).unwrap();
            let q2 = process_noise(m, 0.7, &c2).unwrap();
            assert_relative_eq!(q2, q1 * 2.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn process_noise_rejects_negative_intensity() {
        let cfg = ProcessNoiseConfig {
            accel_psd: -1.0,
            ..Default::default()
        };
        assert!(process_noise(MotionModelKind::ConstantVelocity, 1.0, &cfg).is_err());
    }

    #[test]
    fn cv_predict_advances_position_with_zero_noise() {
        let s = StateVector::new(0.0, 0.0, 1.0, 2.0, 0.0, 0.0).unwrap();
        let p = Matrix6::identity();
        let obj = obj_with(s, p);
        let noise = ProcessNoiseConfig {
            accel_psd: 0.0,
            jerk_psd: 0.0,
            yaw_accel_psd: 0.0,
        };
        let r = predict(MotionModelKind::ConstantVelocity, &obj, 0.5, &noise, None).unwrap();
        assert_relative_eq!(r.state.px, 0.5);
        assert_relative_eq!(r.state.py, 1.0);
        assert_relative_eq!(r.state.vx, 1.0);
        assert_relative_eq!(r.state.vy, 2.0);
        // P = F P F^T
        let f = Matrix6::from_fn(|i, j| {
            transition_matrix(MotionModelKind::ConstantVelocity, &s, 0.5).unwrap()[(i, j)]
        });
        assert_relative_eq!(r.cov, f * p * f.transpose(), epsilon = 1e-12);
    }

    #[test]
    fn no_prediction_keeps_state_and_covariance() {
        let s = StateVector::new(3.0, -2.0, 1.0, 1.0, 123.0, -4.0).unwrap();
        let p = Matrix6::identity() * 2.5;
        let obj = obj_with(s, p);
        let r = predict(
            MotionModelKind::NoPrediction,
            &obj,
            1.0,
            &ProcessNoiseConfig::default(),
            None,
        )
        .unwrap();
        assert_eq!(r.state, s);
        assert_relative_eq!(r.cov, p, epsilon = 1e-12);
    }

    #[test]
    fn ctrv_quarter_circle_matches_arc_integration() {
        // oracle: circular arc of radius v/omega; omega = 90 deg/s over 1 s
        // turns 1 m/s heading-0 motion into position (2/pi, 2/pi), theta 90
        let s = StateVector::new(0.0, 0.0, 1.0, 0.0, 0.0, 90.0).unwrap();
        let obj = obj_with(s, Matrix6::identity());
        let noise = ProcessNoiseConfig {
            accel_psd: 0.0,
            jerk_psd: 0.0,
            yaw_accel_psd: 0.0,
        };
        let r = predict(
            MotionModelKind::ExtendedConstantVelocity,
            &obj,
            1.0,
            &noise,
            None,
        )
        .unwrap();
        let two_over_pi = 2.0 / std::f64::consts::PI;
        assert_relative_eq!(r.state.px, two_over_pi, epsilon = 1e-12);
        assert_relative_eq!(r.state.py, two_over_pi, epsilon = 1e-12);
        assert_relative_eq!(r.state.theta, 90.0, epsilon = 1e-12);
        assert_relative_eq!(r.state.vx, 0.0, epsilon = 1e-12);
        assert_relative_eq!(r.state.vy, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn ctrv_converges_to_cv_at_vanishing_yaw_rate() {
        let s = StateVector::new(1.0, 2.0, 3.0, 4.0, 53.13010235415598, 1e-9).unwrap();
        // align velocity with heading so both models describe the same motion
        let speed = (3.0f64 * 3.0 + 4.0 * 4.0).sqrt();
        let th = s.theta * DEG_TO_RAD;
        let s = StateVector::new(1.0, 2.0, speed * th.cos(), speed * th.sin(), s.theta, 1e-9)
            .unwrap();
        let obj = obj_with(s, Matrix6::identity());
        let noise = ProcessNoiseConfig {
            accel_psd: 0.0,
            jerk_psd: 0.0,
            yaw_accel_psd: 0.0,
        };
        let ctrv = predict(
            MotionModelKind::ExtendedConstantVelocity,
            &obj,
            0.5,
            &noise,
            None,
        )
        .unwrap();
        let cv = predict(MotionModelKind::ConstantVelocity, &obj, 0.5, &noise, None).unwrap();
        assert!((ctrv.state.px - cv.state.px).abs() < 1e-6);
        assert!((ctrv.state.py - cv.state.py).abs() < 1e-6);
    }

    #[test]
    fn linear_models_form_semigroup_without_noise() {
        let noise = ProcessNoiseConfig {
            accel_psd: 0.0,
            jerk_psd: 0.0,
            yaw_accel_psd: 0.0,
        };
        for m in [
            MotionModelKind::NoPrediction,
            MotionModelKind::RandomWalk,
            MotionModelKind::ConstantVelocity,
            MotionModelKind::ConstantAcceleration,
        ] {
            let s = StateVector::new(1.0, -1.0, 2.0, 0.5, 10.0, 3.0).unwrap();
            let mut obj = obj_with(s, Matrix6::identity());
            obj.model_state = Some(ModelState::CartesianAccel { ax: 0.3, ay: -0.2 });
            let two_step = {
                let r1 = predict(m, &obj, 0.3, &noise, None).unwrap();
                let mut o1 = obj.clone();
                o1.state = r1.state;
                o1.state_cov = r1.cov;
                o1.model_state = r1.model_state;
                predict(m, &o1, 0.7, &noise, None).unwrap()
            };
            let one_step = predict(m, &obj, 1.0, &noise, None).unwrap();
            assert_relative_eq!(
                two_step.state.to_vector(),
                one_step.state.to_vector(),
                epsilon = 1e-9
            );
            assert_relative_eq!(two_step.cov, one_step.cov, epsilon = 1e-9);
        }
    }

    #[test]
    fn predicted_covariance_equals_fpft_plus_q_for_linear_models() {
        let s = StateVector::new(0.0, 0.0, 5.0, -3.0, 200.0, 2.0).unwrap();
        let a = Matrix6::from_fn(|i, j| ((i * 6 + j) as f64 * 0.37).sin());
        let p = a * a.transpose() + Matrix6::identity();
        let obj = obj_with(s, p);
        let noise = ProcessNoiseConfig::default();
        for m in [
            MotionModelKind::NoPrediction,
            MotionModelKind::RandomWalk,
            MotionModelKind::ConstantVelocity,
        ] {
            let r = predict(m, &obj, 0.4, &noise, None).unwrap();
            let fd = transition_matrix(m, &s, 0.4).unwrap();
            let f = Matrix6::from_fn(|i, j| fd[(i, j)]);
            let q = process_noise(m, 0.4, &noise).unwrap();
            let expect = f * p * f.transpose() + Matrix6::from_fn(|i, j| q[(i, j)]);
            assert_relative_eq!(r.cov, expect, epsilon = 1e-9);
        }
    }

    #[test]
    fn predict_rejects_negative_dt() {
        let obj = obj_with(StateVector::zeros(), Matrix6::identity());
        assert!(matches!(
            predict(
                MotionModelKind::ConstantVelocity,
                &obj,
                -0.1,
                &ProcessNoiseConfig::default(),
                None
            ),
            Err(Error::NegativeDt(_))
        ));
    }

    #[test]
    fn turning_jacobians_match_central_finite_differences() {
        // randomized states; relative error below 1e-5 elementwise
        let mut rng_state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            rng_state ^= rng_state << 13;
            rng_state ^= rng_state >> 7;
            rng_state ^= rng_state << 17;
            (rng_state >> 11) as f64 / (1u64 << 53) as f64
        };
        for accel in [0.0, 1.5] {
            for _ in 0..200 {
                let s = StateVector::new(
                    next() * 20.0 - 10.0,
                    next() * 20.0 - 10.0,
                    next() * 10.0 - 5.0,
                    next() * 10.0 - 5.0,
                    next() * 360.0,
                    next() * 60.0 - 30.0 + 0.5, // keep away from the eps switch
                )
                .unwrap();
                let dt = 0.1 + next() * 0.9;
                let jac = turning_jacobian(&s, accel, dt);
                let mut max_rel = 0.0f64;
                for k in 0..6 {
                    let scale = [1e-5, 1e-5, 1e-5, 1e-5, 1e-4, 1e-4][k];
                    let mut xp = s.to_vector();
                    let mut xm = s.to_vector();
                    xp[k] += scale;
                    xm[k] -= scale;
                    let sp = StateVector {
                        px: xp[0],
                        py: xp[1],
                        vx: xp[2],
                        vy: xp[3],
                        theta: xp[4],
                        omega: xp[5],
                    };
                    let sm = StateVector {
                        px: xm[0],
                        py: xm[1],
                        vx: xm[2],
                        vy: xm[3],
                        theta: xm[4],
                        omega: xm[5],
                    };
                    let fp = turning_transition(&sp, accel, dt);
                    let fm = turning_transition(&sm, accel, dt);
                    for r in 0..6 {
                        if r == 4 {
                            // yaw row wraps; compare via signed difference
                            let d = crate::angles::wrap_signed(fp[4] - fm[4]) / (2.0 * scale);
                            let a = jac[(4, k)];
                            let rel = (d - a).abs() / a.abs().max(d.abs()).max(1.0);
                            max_rel = max_rel.max(rel);
                            continue;
                        }
                        let d = (fp[r] - fm[r]) / (2.0 * scale);
                        let a = jac[(r, k)];
                        let rel = (d - a).abs() / a.abs().max(d.abs()).max(1.0);
                        max_rel = max_rel.max(rel);
                    }
                }
                assert!(max_rel < 1e-5, "max relative error {max_rel}");
            }
        }
    }
}
