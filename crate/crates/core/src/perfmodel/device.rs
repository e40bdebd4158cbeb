use alloc::string::String;

use crate::scalar::Precision;

/// Resource and bandwidth budget of an FPGA board.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct DeviceProfile {
    pub name: String,
    pub dsp_count: u32,
    pub bram_bytes: u64,
    pub bram_blocks: u32,
    pub uram_bytes: u64,
    pub uram_blocks: u32,
    pub hbm_bytes: u64,
    /// GB/s.
    pub hbm_bandwidth: f64,
    pub hbm_ports: u32,
    pub ddr_bytes: u64,
    /// GB/s.
    pub ddr_bandwidth: f64,
    pub frequency_hz: f64,
    pub word_bytes_fp32: u32,
    pub word_bytes_fp64: u32,
}

impl DeviceProfile {
    /// Xilinx Alveo U280.
    pub fn u280() -> Self {
        Self {
            name: String::from("u280"),
            dsp_count: 8490,
            bram_bytes: 6_600_000,
            bram_blocks: 1487,
            uram_bytes: 34_500_000,
            uram_blocks: 960,
            hbm_bytes: 8_000_000_000,
            hbm_bandwidth: 460.0,
            hbm_ports: 32,
            ddr_bytes: 32_000_000_000,
            ddr_bandwidth: 38.4,
            frequency_hz: 300e6,
            word_bytes_fp32: 4,
            word_bytes_fp64: 8,
        }
    }

    /// Built-in profile by (case-insensitive) name.
    pub fn builtin(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "u280" | "alveo-u280" => Some(Self::u280()),
            _ => None,
        }
    }

    pub fn word_bytes(&self, precision: Precision) -> u64 {
        match precision {
            Precision::Fp32 => self.word_bytes_fp32 as u64,
            Precision::Fp64 => self.word_bytes_fp64 as u64,
        }
    }

    /// BRAM plus URAM capacity.
    pub fn on_chip_bytes(&self) -> u64 {
        self.bram_bytes + self.uram_bytes
    }

    pub fn validate(&self) -> Result<(), &'static str> {
        let counts = [
            self.dsp_count as u64,
            self.bram_bytes,
            self.bram_blocks as u64,
            self.uram_bytes,
            self.uram_blocks as u64,
            self.hbm_bytes,
            self.hbm_ports as u64,
            self.ddr_bytes,
            self.word_bytes_fp32 as u64,
            self.word_bytes_fp64 as u64,
        ];
        if counts.contains(&0) {
            return Err("device counts must be positive");
        }
        for v in [self.hbm_bandwidth, self.ddr_bandwidth, self.frequency_hz] {
            if !(v > 0.0) || !v.is_finite() {
                return Err("device rates must be positive");
            }
        }
        Ok(())
    }
}

impl Default for DeviceProfile {
    fn default() -> Self {
        Self::u280()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn u280_values() {
        let d = DeviceProfile::u280();
        assert_eq!(d.dsp_count, 8490);
        assert_eq!((d.bram_blocks, d.uram_blocks), (1487, 960));
        assert_eq!(d.hbm_ports, 32);
        assert_eq!(d.hbm_bandwidth, 460.0);
        assert_eq!(d.on_chip_bytes(), 41_100_000);
        assert!(d.validate().is_ok());
        assert_eq!(DeviceProfile::builtin("U280"), Some(d));
        assert_eq!(DeviceProfile::builtin("u50"), None);
    }

    #[test]
    fn validation_rejects_zero() {
        let mut d = DeviceProfile::u280();
        d.hbm_ports = 0;
        assert!(d.validate().is_err());
        let mut d = DeviceProfile::u280();
        d.frequency_hz = 0.0;
        assert!(d.validate().is_err());
    }
}
