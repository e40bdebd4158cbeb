//! Published hardware measurements on the U280, used to calibrate the model.
//!
//! Bandwidths are GB/s of mesh data moved per call. A runtime is recovered
//! from a bandwidth with [`runtime_from_bandwidth`].

use super::design::ModelError;

/// Batched Thomas, 8000 systems of 128 rows, FP32.
pub const THOMAS_8000X128_SECONDS: f64 = 0.47e-3;
pub const THOMAS_8000X128_BANDWIDTH: f64 = 43.34;

/// Clock of the 2D and 3D ADI builds.
pub const ADI2D_FREQUENCY_HZ: f64 = 292e6;
pub const ADI3D_FREQUENCY_HZ: f64 = 288e6;

/// `(edge, bandwidth at 1500 meshes, bandwidth at 3000 meshes)`, 120 iterations.
pub const ADI2D_FP32: [(u32, f64, f64); 7] = [
    (32, 501.0, 563.0),
    (48, 551.0, 596.0),
    (64, 524.0, 556.0),
    (80, 597.0, 621.0),
    (96, 604.0, 627.0),
    (112, 602.0, 626.0),
    (128, 602.0, 620.0),
];
pub const ADI2D_FP32_UNROLL: u32 = 3;

pub const ADI2D_FP64: [(u32, f64, f64); 7] = [
    (32, 360.0, 395.0),
    (48, 377.0, 402.0),
    (64, 380.0, 399.0),
    (80, 402.0, 418.0),
    (96, 408.0, 421.0),
    (112, 411.0, 424.0),
    (128, 411.0, 422.0),
];
pub const ADI2D_FP64_UNROLL: u32 = 2;

/// `([x, y, z], bandwidth at 24 meshes, bandwidth at 72 meshes)`, 100 iterations.
pub const ADI3D_FP32: [([u32; 3], f64, f64); 6] = [
    ([32, 32, 32], 218.0, 266.0),
    ([80, 32, 32], 252.0, 323.0),
    ([48, 48, 48], 288.0, 338.0),
    ([80, 64, 64], 326.0, 351.0),
    ([80, 80, 80], 337.0, 353.0),
    ([96, 96, 96], 346.0, 358.0),
];

pub const ADI3D_FP64: [([u32; 3], f64, f64); 6] = [
    ([32, 32, 32], 201.0, 239.0),
    ([80, 32, 32], 222.0, 262.0),
    ([48, 48, 48], 242.0, 267.0),
    ([80, 64, 64], 262.0, 274.0),
    ([80, 80, 80], 265.0, 271.0),
    ([96, 96, 96], 271.0, 276.0),
];

/// Tiled 2D FP64, 100 iterations:
/// `(edge, [Thomas-PCR, Thomas-Thomas] at 60 meshes, same at 180 meshes)`.
pub const ADI2D_TILED_FP64: [(u32, [f64; 2], [f64; 2]); 6] = [
    (256, [206.0, 203.0], [217.0, 215.0]),
    (384, [213.0, 209.0], [220.0, 218.0]),
    (512, [218.0, 217.0], [222.0, 222.0]),
    (640, [218.0, 217.0], [221.0, 221.0]),
    (768, [220.0, 219.0], [223.0, 222.0]),
    (896, [220.0, 219.0], [222.0, 222.0]),
];

/// Seconds needed to move `bytes` at `gbs` GB/s.
pub fn runtime_from_bandwidth(bytes: f64, gbs: f64) -> Result<f64, ModelError> {
    if !(gbs > 0.0) {
        return Err(ModelError::InvalidParameter("bandwidth must be positive"));
    }
    Ok(bytes / (gbs * 1e9))
}

/// Predicted against measured.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Comparison {
    pub predicted: f64,
    pub measured: f64,
    /// `|predicted - measured| / measured`
    pub relative_error: f64,
}

impl Comparison {
    pub fn new(predicted: f64, measured: f64) -> Self {
        Self {
            predicted,
            measured,
            relative_error: (predicted - measured).abs() / measured,
        }
    }

    pub fn within(&self, tol: f64) -> bool {
        self.relative_error <= tol
    }
}
