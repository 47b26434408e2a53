use bidisc_core::bipoly::SamplerConfig;
use bidisc_core::decomp::DecompConfig;
use bidisc_core::opcore::CertifyConfig;
use serde::Serialize;

/// Settings shared by every subcommand. Embedded in each report so a run can
/// be repeated exactly.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub tol: f64,
    pub rank_tol: f64,
    pub samples: usize,
    pub seed: u64,
    pub truncation: usize,
    pub probe_degree: usize,
    pub output_path: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            tol: 1e-9,
            rank_tol: 1e-8,
            samples: 512,
            seed: 0,
            truncation: 6,
            probe_degree: 2,
            output_path: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), String> {
        for (name, v) in [("tol", self.tol), ("rank-tol", self.rank_tol)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(format!("--{name} must be a positive number, got {v}"));
            }
        }
        if self.samples == 0 {
            return Err("--samples must be at least 1".into());
        }
        if self.truncation < self.probe_degree + 1 {
            return Err(format!(
                "--truncation {} must be at least --probe-degree + 1 = {}",
                self.truncation,
                self.probe_degree + 1
            ));
        }
        Ok(())
    }

    pub fn sampler(&self) -> SamplerConfig {
        SamplerConfig {
            samples: self.samples,
            tol: self.tol,
            seed: self.seed,
        }
    }

    pub fn certify(&self) -> CertifyConfig {
        CertifyConfig {
            tol: self.tol,
            rank_tol: self.rank_tol,
            ..CertifyConfig::default()
        }
    }

    pub fn decomp(&self) -> DecompConfig {
        DecompConfig {
            tol: self.tol,
            rank_tol: self.rank_tol,
            sampler: self.sampler(),
        }
    }
}
