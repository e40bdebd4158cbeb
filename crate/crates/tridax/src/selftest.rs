//! Checks run by `tridax selftest`.

use tridax_core::perfmodel::{estimate_latency, DesignKind, DesignPoint, Workload};
use tridax_core::scalar::max_abs_diff;
use tridax_core::{adi_step, dense_oracle_solve, AdiConfig, Algorithm, DiagonalRule, Dims, Precision};

use crate::{calibration, generate, reference};

pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

fn solvers() -> Check {
    let algos = [
        Algorithm::Thomas,
        Algorithm::Pcr,
        Algorithm::ThomasThomas { tiles: 4 },
        Algorithm::ThomasPcr { tiles: 4 },
    ];
    let mut worst = 0.0f64;
    for n in [16, 100, 257] {
        for sys in generate::random_systems::<f64>(&generate::SystemSpec::new(n as u64, 4, n)) {
            let exact = dense_oracle_solve(&sys).expect("small system");
            let scale = exact.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
            for algo in algos {
                let u = algo.solve(&sys).expect("dominant system");
                worst = worst.max(max_abs_diff(&u, &exact) / scale);
            }
        }
    }
    Check {
        name: "solvers match dense elimination",
        pass: worst <= Precision::Fp64.tolerance(),
        detail: format!("max relative error {worst:.2e}"),
    }
}

fn adi() -> Check {
    let u0 = generate::random_mesh::<f64>(5, Dims::new(12, 12, 12), 2).unwrap();
    let cfg = AdiConfig::new(0.5, 1);
    let mut u = u0.clone();
    let mut r = u0;
    let mut dev = 0.0f64;
    for _ in 0..3 {
        adi_step(&mut u, &cfg).expect("valid mesh");
        reference::naive_adi_step(&mut r, 0.5, DiagonalRule::Standard);
        dev = dev.max(max_abs_diff(u.data(), r.data()));
    }
    Check {
        name: "ADI matches naive reference",
        pass: dev <= 1e-12,
        detail: format!("max deviation {dev:.2e}"),
    }
}

fn model() -> Check {
    let w = Workload::Batched { n: 128, batch: 8000 };
    let d = DesignPoint::new(DesignKind::BatchedThomas, Precision::Fp32);
    let l = estimate_latency(&w, &d).expect("valid design");
    let c = calibration::compare(&w, &d, &l).expect("published row");
    Check {
        name: "batched Thomas model vs measured runtime",
        pass: c.comparison.within(0.15),
        detail: format!(
            "predicted {:.4} ms, measured {:.2} ms, error {:.1}%",
            l.seconds * 1e3,
            c.comparison.measured * 1e3,
            100.0 * c.comparison.relative_error
        ),
    }
}

pub fn run_all() -> Vec<Check> {
    vec![solvers(), adi(), model()]
}
