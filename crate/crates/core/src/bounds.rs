//! Closed-form probability bounds and the expected similarity matrix.
//!
//! Functions ending in `_upper`/`_lower` are rigorous bounds except
//! [`between_accept_upper`], which drops an `o(1)` term and is only an
//! asymptotic envelope.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{sym2_eigen, SymMatrix};
use crate::model::Label;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    pub t: f64,
    pub sigma: f64,
    pub ell: f64,
}

fn check_positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(name, format!("{v} is not positive")))
    }
}

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma >= 0.0 && sigma.is_finite() {
        Ok(())
    } else {
        Err(invalid("sigma", format!("{sigma} is negative")))
    }
}

/// Chernoff bound `P(chi2_k >= theta k) <= exp(-(k/2)(theta - 1 - ln theta))`.
pub fn tail_chi2(k: u32, theta: f64) -> Result<f64> {
    if !(theta > 1.0) {
        return Err(Error::OutOfValidity {
            bound: "tail_chi2",
            condition: "theta > 1",
        });
    }
    if theta.is_infinite() {
        return Ok(0.0);
    }
    Ok((-(k as f64 / 2.0) * (theta - 1.0 - theta.ln())).exp())
}

/// Rayleigh CDF `1 - exp(-t^2 / (2 scale^2))`.
pub fn cdf_rayleigh(t: f64, scale: f64) -> Result<f64> {
    check_positive("scale", scale)?;
    if !(t >= 0.0) {
        return Err(invalid("t", "must be nonnegative"));
    }
    Ok(-(-(t * t) / (2.0 * scale * scale)).exp_m1())
}

/// Chernoff bound `P(|X - mu| >= delta mu) <= 2 exp(-delta^2 mu / 3)`, capped at 1.
pub fn tail_binomial(mu: f64, delta: f64) -> Result<f64> {
    check_positive("mu", mu)?;
    if !(delta > 0.0 && delta < 1.0) {
        return Err(invalid("delta", format!("{delta} is outside (0, 1)")));
    }
    Ok((2.0 * (-delta * delta * mu / 3.0).exp()).min(1.0))
}

/// Upper bound on `1 - p`, the chance a within-community triple is rejected.
pub fn within_miss_upper(t: f64, sigma: f64) -> Result<f64> {
    check_positive("t", t)?;
    check_sigma(sigma)?;
    if sigma == 0.0 {
        return Ok(0.0);
    }
    if !(t > 3f64.sqrt() * sigma) {
        return Err(Error::OutOfValidity {
            bound: "within_miss_upper",
            condition: "t > sqrt(3) sigma",
        });
    }
    let ratio = t * t / (3.0 * sigma * sigma);
    Ok(tail_chi2(3, ratio)?.clamp(0.0, 1.0))
}

/// Lower bound on `q`, the chance a between-community triple is accepted.
pub fn between_accept_lower(t: f64, sigma: f64, ell: f64) -> Result<f64> {
    check_positive("t", t)?;
    check_positive("ell", ell)?;
    check_sigma(sigma)?;
    let geometric = t * 2f64.sqrt() / ell - t * t / (2.0 * ell * ell);
    if geometric < 0.0 {
        return Err(Error::OutOfValidity {
            bound: "between_accept_lower",
            condition: "t sqrt(2)/ell >= t^2/(2 ell^2)",
        });
    }
    let noise = if sigma == 0.0 {
        1.0
    } else {
        -(-(t * t) / (8.0 * sigma * sigma)).exp_m1()
    };
    Ok((geometric * noise).clamp(0.0, 1.0))
}

/// Leading-order envelope `4 (t + sigma) ln(ell / (t + sigma))` for `q`.
/// Not a certified bound: the `o(1)` correction is dropped.
pub fn between_accept_upper(t: f64, sigma: f64, ell: f64) -> Result<f64> {
    check_positive("t", t)?;
    check_positive("ell", ell)?;
    check_sigma(sigma)?;
    let x = t + sigma;
    if !(x < ell / std::f64::consts::E) {
        return Err(Error::OutOfValidity {
            bound: "between_accept_upper",
            condition: "t + sigma < ell / e",
        });
    }
    Ok(4.0 * x * (ell / x).ln())
}

/// Upper bound `7 (t + sigma / ell)` on the chance the two enlarged discs
/// around a same-segment pair intersect.
pub fn disc_intersect_upper(t: f64, sigma: f64, ell: f64) -> Result<f64> {
    check_positive("ell", ell)?;
    check_sigma(sigma)?;
    if !(t >= 0.0) {
        return Err(invalid("t", "must be nonnegative"));
    }
    Ok(7.0 * (t + sigma / ell))
}

/// Expected co-incidence matrix of the two-community hypergraph model.
#[derive(Clone, Debug)]
pub struct ExpectedSimilarity {
    pub n: usize,
    pub p: f64,
    pub q: f64,
    pub w_in: f64,
    pub w_out: f64,
    /// `+1` for label 1, `-1` for label 2.
    pub signs: Vec<f64>,
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda_rest: f64,
    /// `lambda2 - lambda_rest = N (N - 2) (p - q) / 4`.
    pub gap: f64,
    /// `sum(z) == 0`; the closed-form spectrum is exact only then.
    pub balanced: bool,
}

/// Top-two eigenpairs of the expected matrix computed exactly for any `z`.
#[derive(Clone, Debug)]
pub struct ExactTop2 {
    /// `(lambda_1, lambda_2, lambda_3)`.
    pub values: [f64; 3],
    /// Rows of the `N x 2` eigenvector matrix.
    pub rows: Vec<[f64; 2]>,
}

impl ExactTop2 {
    pub fn gap(&self) -> f64 {
        self.values[1] - self.values[2]
    }
}

impl ExpectedSimilarity {
    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        if i == j {
            0.0
        } else {
            0.5 * (self.w_in + self.w_out) + 0.5 * (self.w_in - self.w_out) * self.signs[i] * self.signs[j]
        }
    }

    pub fn to_matrix(&self) -> SymMatrix {
        SymMatrix::from_fn(self.n, |i, j| self.entry(i, j))
    }

    /// Spectrum via the 2x2 compression onto `span{1, z}`; the orthogonal
    /// complement carries the eigenvalue `-w_in`. Needs both labels present.
    pub fn exact_top2(&self) -> Result<ExactTop2> {
        let n = self.n as f64;
        let a = 0.5 * (self.w_in + self.w_out);
        let b = 0.5 * (self.w_in - self.w_out);
        let s: f64 = self.signs.iter().sum();
        let r2 = n - s * s / n;
        if r2 <= 0.0 {
            return Err(invalid("z", "both communities must be present"));
        }
        let r = r2.sqrt();
        // compressed matrix in the basis e1 = 1/sqrt(N), e2 = (z - s/N 1)/r;
        // a, b >= 0 so both compressed eigenvalues are >= 0
        let h11 = a * n + b * s * s / n;
        let h12 = b * r * s / n.sqrt();
        let h22 = b * r2;
        let (hi, lo, v) = sym2_eigen(h11, h12, h22);
        let w = [-v[1], v[0]];
        let e1 = 1.0 / n.sqrt();
        let rows = self
            .signs
            .iter()
            .map(|&z| {
                let e2 = (z - s / n) / r;
                [v[0] * e1 + v[1] * e2, w[0] * e1 + w[1] * e2]
            })
            .collect();
        Ok(ExactTop2 {
            values: [hi - self.w_in, lo - self.w_in, -self.w_in],
            rows,
        })
    }
}

/// Expected similarity matrix for acceptance rates `p` (within) and `q`
/// (between) and ground-truth labels `z`.
pub fn expected_similarity(n: usize, p: f64, q: f64, z: &[Label]) -> Result<ExpectedSimilarity> {
    if z.len() != n {
        return Err(Error::LengthMismatch(z.len(), n));
    }
    if n < 2 {
        return Err(Error::SizeTooSmall(n));
    }
    if !(0.0 <= q && q <= p && p <= 1.0) {
        return Err(invalid("p, q", format!("need 0 <= q <= p <= 1, got p={p}, q={q}")));
    }
    let signs: Vec<f64> = z
        .iter()
        .enumerate()
        .map(|(index, &v)| match v {
            1 => Ok(1.0),
            2 => Ok(-1.0),
            value => Err(Error::BadLabel { index, value }),
        })
        .collect::<Result<_>>()?;
    let nf = n as f64;
    let w_in = (nf - 2.0) * (p + q) / 2.0;
    let w_out = (nf - 2.0) * q;
    let lambda1 = 0.5 * (w_in + w_out) * nf - w_in;
    let lambda2 = 0.5 * (w_in - w_out) * nf - w_in;
    let balanced = signs.iter().sum::<f64>() == 0.0;
    Ok(ExpectedSimilarity {
        n,
        p,
        q,
        w_in,
        w_out,
        signs,
        lambda1,
        lambda2,
        lambda_rest: -w_in,
        gap: nf * (nf - 2.0) * (p - q) / 4.0,
        balanced,
    })
}
