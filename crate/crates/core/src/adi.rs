//! Alternating-direction implicit heat diffusion on batched 2D/3D meshes.
//!
//! One step computes the explicit increment `d = γ·Σ_axes δ²u` at interior
//! points, then sweeps `(1 + γ)·d_i − γ/2·(d_{i−1} + d_{i+1}) = d_i` along x, y
//! and (in 3D) z, and finally accumulates `u += d`. Boundary points keep their
//! stored values (their increment is zero and the boundary rows of every line
//! are identity rows).

use thiserror::Error;

use crate::batch::Algorithm;
use crate::mesh::{solve_lines, Axis, CoefficientSource, Dims, ExecConfig, LineRef, LineSolveError, Mesh};
use crate::scalar::Real;

/// Main-diagonal rule for the implicit sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum DiagonalRule {
    /// `b = 1 + γ`.
    #[default]
    Standard,
    /// `b = γ`, kept for comparison with hardware models that use it.
    Literal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdiConfig {
    pub gamma: f64,
    pub n_iter: usize,
    /// Iterations grouped per reporting block. Does not change the numerics.
    pub unroll: usize,
    pub rule: DiagonalRule,
    pub algo: Algorithm,
    pub exec: ExecConfig,
}

impl AdiConfig {
    pub fn new(gamma: f64, n_iter: usize) -> Self {
        Self {
            gamma,
            n_iter,
            unroll: 1,
            rule: DiagonalRule::Standard,
            algo: Algorithm::Thomas,
            exec: ExecConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<(), AdiError> {
        if !(self.gamma > 0.0) || !self.gamma.is_finite() {
            return Err(AdiError::InvalidConfig("gamma must be positive and finite"));
        }
        if self.n_iter == 0 {
            return Err(AdiError::InvalidConfig("n_iter must be at least 1"));
        }
        if self.unroll == 0 {
            return Err(AdiError::InvalidConfig("unroll factor must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AdiError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("{axis} extent {extent} is below the minimum of 4")]
    MeshTooSmall { axis: Axis, extent: usize },
    #[error("non-finite value in the input mesh")]
    NonFinite,
    #[error("elapsed time must be positive")]
    ZeroDuration,
    #[error(transparent)]
    Solve(#[from] LineSolveError),
}

/// Line coefficients of the implicit sweeps: identity rows at both ends of a
/// line, `(−γ/2, b, −γ/2)` elsewhere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdiCoefficients<T> {
    pub lower: T,
    pub diag: T,
    pub upper: T,
}

impl<T: Real> AdiCoefficients<T> {
    pub fn new(gamma: f64, rule: DiagonalRule) -> Self {
        let off = T::from_f64(-0.5 * gamma);
        let diag = match rule {
            DiagonalRule::Standard => T::from_f64(1.0 + gamma),
            DiagonalRule::Literal => T::from_f64(gamma),
        };
        Self {
            lower: off,
            diag,
            upper: off,
        }
    }

    #[inline]
    pub fn row(&self, i: usize, len: usize) -> (T, T, T) {
        if i == 0 || i + 1 == len {
            (T::ZERO, T::ONE, T::ZERO)
        } else {
            (self.lower, self.diag, self.upper)
        }
    }
}

impl<T: Real> CoefficientSource<T> for AdiCoefficients<T> {
    fn fill(&self, line: &LineRef, a: &mut [T], b: &mut [T], c: &mut [T]) {
        for i in 0..line.len {
            let (ai, bi, ci) = self.row(i, line.len);
            a[i] = ai;
            b[i] = bi;
            c[i] = ci;
        }
    }
}

/// Checks the mesh is large enough for every swept axis.
pub fn check_mesh(dims: Dims) -> Result<(), AdiError> {
    for &axis in dims.solved_axes() {
        let extent = dims.extent(axis);
        if extent < 4 {
            return Err(AdiError::MeshTooSmall { axis, extent });
        }
    }
    Ok(())
}

/// Explicit right-hand side: `d = γ·Σ_axes (u_{−1} − 2u + u_{+1})` at interior
/// points and zero on the boundary.
///
/// Each second difference is evaluated as `(u_{−1} − 2·u) + u_{+1}` and the
/// axis terms are summed in x, y, z order.
pub fn adi_rhs<T: Real>(u: &Mesh<T>, cfg: &AdiConfig) -> Result<(AdiCoefficients<T>, Mesh<T>), AdiError> {
    cfg.validate()?;
    let dims = u.dims();
    if u.data().iter().any(|v| !v.is_finite()) {
        return Err(AdiError::NonFinite);
    }
    let gamma = T::from_f64(cfg.gamma);
    let two = T::from_f64(2.0);
    let Dims { x, y, z } = dims;
    let planar = dims.is_planar();
    let sx = 1;
    let sy = x;
    let sz = x * y;
    let mut d = Mesh::zeros(dims, u.batch()).expect("same shape as u");
    let src = u.data();
    let dst = d.data_mut();
    let (k_lo, k_hi) = if planar { (0, 1) } else { (1, z.saturating_sub(1)) };
    for b in 0..u.batch() {
        let mb = b * dims.points();
        for k in k_lo..k_hi {
            for j in 1..y.saturating_sub(1) {
                let row = mb + k * sz + j * sy;
                for i in 1..x.saturating_sub(1) {
                    let o = row + i;
                    let c = src[o];
                    let mut s = (src[o - sx] - two * c) + src[o + sx];
                    s += (src[o - sy] - two * c) + src[o + sy];
                    if !planar {
                        s += (src[o - sz] - two * c) + src[o + sz];
                    }
                    dst[o] = gamma * s;
                }
            }
        }
    }
    Ok((AdiCoefficients::new(cfg.gamma, cfg.rule), d))
}

/// One implicit sweep along `axis`, solving in place on `d`.
pub fn adi_sweep<T: Real>(
    d: &mut Mesh<T>,
    coeffs: &AdiCoefficients<T>,
    axis: Axis,
    cfg: &AdiConfig,
) -> Result<(), AdiError> {
    solve_lines(d, coeffs, axis, cfg.algo, cfg.exec)?;
    Ok(())
}

/// `u += d`; returns `‖d‖∞`.
pub fn adi_update<T: Real>(u: &mut Mesh<T>, d: &Mesh<T>) -> f64 {
    debug_assert_eq!(u.data().len(), d.data().len());
    for (ui, di) in u.data_mut().iter_mut().zip(d.data()) {
        *ui += *di;
    }
    d.max_abs()
}

/// One full ADI step. Returns `‖u' − u‖∞`.
pub fn adi_step<T: Real>(u: &mut Mesh<T>, cfg: &AdiConfig) -> Result<f64, AdiError> {
    check_mesh(u.dims())?;
    let (coeffs, mut d) = adi_rhs(u, cfg)?;
    for &axis in u.dims().solved_axes() {
        adi_sweep(&mut d, &coeffs, axis, cfg)?;
    }
    Ok(adi_update(u, &d))
}

/// Bytes logically moved by each phase of one ADI iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AdiTraffic {
    /// Reads `u`, writes `d`.
    pub rhs: u64,
    /// Per swept axis: reads and writes `d`, plus `a, b, c` when stored.
    pub sweep: u64,
    pub sweeps: u32,
    /// Reads `u` and `d`, writes `u`.
    pub update: u64,
}

impl AdiTraffic {
    pub fn new(dims: Dims, batch: usize, word_bytes: usize, stored_coefficients: bool) -> Self {
        let mesh = (dims.points() * batch * word_bytes) as u64;
        let coeff = if stored_coefficients { 3 * mesh } else { 0 };
        Self {
            rhs: 2 * mesh,
            sweep: 2 * mesh + coeff,
            sweeps: dims.solved_axes().len() as u32,
            update: 3 * mesh,
        }
    }

    pub fn per_iteration(&self) -> u64 {
        self.rhs + self.sweeps as u64 * self.sweep + self.update
    }
}

/// Achieved bandwidth in GB/s.
pub fn effective_bandwidth(bytes: u64, seconds: f64) -> Result<f64, AdiError> {
    if !(seconds > 0.0) {
        return Err(AdiError::ZeroDuration);
    }
    Ok(bytes as f64 / seconds / 1e9)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bandwidth() {
        assert_eq!(effective_bandwidth(2_000_000_000, 2.0).unwrap(), 1.0);
        assert_eq!(effective_bandwidth(1, 0.0), Err(AdiError::ZeroDuration));
    }

    #[test]
    fn config_validation() {
        assert!(AdiConfig::new(0.5, 1).validate().is_ok());
        assert!(AdiConfig::new(0.0, 1).validate().is_err());
        assert!(AdiConfig::new(f64::NAN, 1).validate().is_err());
        assert!(AdiConfig::new(0.5, 0).validate().is_err());
        let mut c = AdiConfig::new(0.5, 3);
        c.unroll = 0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn small_meshes_rejected() {
        let u = Mesh::<f64>::zeros(Dims::new(8, 3, 8), 1).unwrap();
        let mut u = u;
        assert_eq!(
            adi_step(&mut u, &AdiConfig::new(0.5, 1)).unwrap_err(),
            AdiError::MeshTooSmall {
                axis: Axis::Y,
                extent: 3
            }
        );
        // z = 1 is a planar mesh and is not swept
        let mut u = Mesh::<f64>::zeros(Dims::planar(4, 4), 1).unwrap();
        assert!(adi_step(&mut u, &AdiConfig::new(0.5, 1)).is_ok());
    }

    #[test]
    fn constant_field_has_zero_rhs() {
        let u = Mesh::filled(Dims::new(6, 5, 4), 2, 3.25f64).unwrap();
        let (_, d) = adi_rhs(&u, &AdiConfig::new(0.7, 1)).unwrap();
        assert!(d.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn linear_field_along_x_has_no_x_contribution() {
        // u depends on i only: the y and z differences vanish too
        let u = Mesh::from_fn(Dims::new(8, 3, 3), 1, |_, i, _, _| i as f64).unwrap();
        let (_, d) = adi_rhs(&u, &AdiConfig::new(0.5, 1)).unwrap();
        assert!(d.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn coefficient_rules() {
        let s = AdiCoefficients::<f64>::new(0.5, DiagonalRule::Standard);
        assert_eq!(s.row(1, 5), (-0.25, 1.5, -0.25));
        assert_eq!(s.row(0, 5), (0.0, 1.0, 0.0));
        assert_eq!(s.row(4, 5), (0.0, 1.0, 0.0));
        let l = AdiCoefficients::<f64>::new(0.5, DiagonalRule::Literal);
        assert_eq!(l.row(2, 5), (-0.25, 0.5, -0.25));
    }

    #[test]
    fn zero_field_is_a_fixed_point() {
        let mut u = Mesh::<f64>::zeros(Dims::new(6, 6, 6), 2).unwrap();
        let delta = adi_step(&mut u, &AdiConfig::new(0.5, 1)).unwrap();
        assert_eq!(delta, 0.0);
        assert!(u.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn boundary_values_are_kept() {
        let u0 = Mesh::from_fn(Dims::planar(6, 5), 1, |_, i, j, _| {
            if i == 0 || j == 0 || i == 5 || j == 4 {
                1.0
            } else {
                0.0
            }
        })
        .unwrap();
        let mut u = u0.clone();
        adi_step(&mut u, &AdiConfig::new(0.5, 1)).unwrap();
        for j in 0..5 {
            for i in 0..6 {
                if i == 0 || j == 0 || i == 5 || j == 4 {
                    assert_eq!(u.get(0, i, j, 0), 1.0);
                }
            }
        }
        // heat flows inward from the hot boundary
        assert!(u.get(0, 1, 1, 0) > 0.0);
    }

    #[test]
    fn traffic_accounting() {
        let t = AdiTraffic::new(Dims::planar(128, 128), 3000, 4, false);
        let mesh = 128 * 128 * 3000 * 4;
        assert_eq!(t.per_iteration(), 9 * mesh);
        let t3 = AdiTraffic::new(Dims::new(8, 8, 8), 1, 8, true);
        assert_eq!(t3.sweeps, 3);
        assert_eq!(t3.per_iteration(), (2 + 3 * 5 + 3) * 8 * 8 * 8 * 8);
    }

    #[test]
    fn non_finite_input_rejected() {
        let mut u = Mesh::<f64>::zeros(Dims::planar(5, 5), 1).unwrap();
        u.set(0, 2, 2, 0, f64::INFINITY);
        assert_eq!(adi_rhs(&u, &AdiConfig::new(0.5, 1)).unwrap_err(), AdiError::NonFinite);
    }
}
