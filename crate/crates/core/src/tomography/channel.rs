use crate::error::{Error, Result};
use crate::noise::{depolarize, depolarize_qubit, NoiseConfig, NoiseTarget};
use crate::protocol::{bsm_project_density, prepare_resource, BellOutcome, UnitaryOracle};
use crate::qmath::DensityMatrix;

/// The channel under test: one protocol round on a (possibly mixed) input,
/// post-selected on the heralding outcome (0, 0), with optional depolarizing
/// noise on the resource pair or on the output qubit.
#[derive(Debug, Clone)]
pub struct HeraldedInverse {
    oracle: UnitaryOracle,
    noise: NoiseConfig,
}

impl HeraldedInverse {
    pub fn new(oracle: UnitaryOracle, noise: NoiseConfig) -> Self {
        Self { oracle, noise }
    }

    pub fn noise(&self) -> NoiseConfig {
        self.noise
    }

    /// Output state and heralding probability for input `rho`.
    pub fn run(&self, rho: &DensityMatrix) -> Result<(f64, DensityMatrix)> {
        if rho.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: rho.dim(),
            });
        }
        let mut oracle = self.oracle.fresh();
        let mut resource = prepare_resource(&mut oracle)?.density();
        let p_res = self.noise.p_at(NoiseTarget::Resource);
        if p_res > 0.0 {
            resource = depolarize_qubit(&resource, 0, p_res)?;
            resource = depolarize_qubit(&resource, 1, p_res)?;
        }
        let joint = rho.tensor(&resource)?;
        let (prob, out) = bsm_project_density(&joint, BellOutcome::SUCCESS)?;
        let p_out = self.noise.p_at(NoiseTarget::Output);
        let out = if p_out > 0.0 { depolarize(&out, p_out)? } else { out };
        Ok((prob, out))
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        self.run(rho).map(|(_, out)| out)
    }
}
