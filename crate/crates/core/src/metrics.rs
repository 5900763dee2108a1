//! Permutation-invariant recovery metrics for two communities.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Label;

fn check(z_hat: &[Label], z: &[Label]) -> Result<()> {
    if z_hat.len() != z.len() {
        return Err(Error::LengthMismatch(z_hat.len(), z.len()));
    }
    for (index, &value) in z_hat.iter().chain(z).enumerate() {
        if value != 1 && value != 2 {
            return Err(Error::BadLabel {
                index: index % z.len().max(1),
                value,
            });
        }
    }
    Ok(())
}

/// Hamming distance minimized over the two relabelings.
pub fn ham_star(z_hat: &[Label], z: &[Label]) -> Result<usize> {
    check(z_hat, z)?;
    let mismatches = z_hat.iter().zip(z).filter(|(a, b)| a != b).count();
    Ok(mismatches.min(z.len() - mismatches))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecoveryReport {
    pub ham_star: usize,
    pub rate: f64,
    pub exact: bool,
    pub n: usize,
}

pub fn report(z_hat: &[Label], z: &[Label]) -> Result<RecoveryReport> {
    let h = ham_star(z_hat, z)?;
    let n = z.len();
    Ok(RecoveryReport {
        ham_star: h,
        rate: if n == 0 { 0.0 } else { h as f64 / n as f64 },
        exact: h == 0,
        n,
    })
}
