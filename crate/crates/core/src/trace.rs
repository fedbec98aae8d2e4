//! The weighted trace `phi_alpha` on positive operators and its signed and
//! complex extensions.

use std::borrow::Cow;
use std::fmt;

use crate::error::{Error, Result};
use crate::spectra::distribution::kahan_sum;
use crate::spectra::{abs_distribution, spectral_distribution, HermitianOperator, Matrix, SpectralDistribution, C64};
use crate::weights::WeightFunction;

/// Slack allowed when a positive operator's computed spectrum dips below 0.
const POSITIVITY_SLACK: f64 = 1e-12;
/// Agreement required between the shifts `c` and `c + 1`.
pub const SHIFT_INDEPENDENCE_TOL: f64 = 1e-12;
/// Slack in the Chebyshev comparison.
pub const CHEBYSHEV_TOL: f64 = 1e-10;

/// Anything with a real spectrum under the normalized trace.
pub trait SpectralInput {
    fn distribution(&self) -> Result<Cow<'_, SpectralDistribution>>;
}

impl SpectralInput for SpectralDistribution {
    fn distribution(&self) -> Result<Cow<'_, SpectralDistribution>> {
        Ok(Cow::Borrowed(self))
    }
}

impl SpectralInput for HermitianOperator {
    fn distribution(&self) -> Result<Cow<'_, SpectralDistribution>> {
        Ok(Cow::Owned(spectral_distribution(self)?))
    }
}

/// Inputs whose modulus `|x|` has a spectrum.
pub trait ModulusInput {
    fn modulus(&self) -> Result<SpectralDistribution>;
}

impl ModulusInput for SpectralDistribution {
    fn modulus(&self) -> Result<SpectralDistribution> {
        Ok(self.abs())
    }
}

impl ModulusInput for HermitianOperator {
    fn modulus(&self) -> Result<SpectralDistribution> {
        Ok(spectral_distribution(self)?.abs())
    }
}

impl ModulusInput for Matrix {
    fn modulus(&self) -> Result<SpectralDistribution> {
        abs_distribution(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExtensionKind {
    Positive,
    Symmetric,
    Antisymmetric,
    Translatable,
    Complex,
}

impl fmt::Display for ExtensionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExtensionKind::Positive => "positive",
            ExtensionKind::Symmetric => "symmetric",
            ExtensionKind::Antisymmetric => "antisymmetric",
            ExtensionKind::Translatable => "translatable",
            ExtensionKind::Complex => "complex",
        })
    }
}

/// A trace value tagged with the weight and the extension that produced it.
/// Real extensions leave the imaginary part at zero.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceValue {
    pub value: C64,
    pub weight_name: String,
    pub kind: ExtensionKind,
}

impl TraceValue {
    pub fn re(&self) -> f64 {
        self.value.re
    }
}

/// `sum_i lambda_i (alpha(c_i) - alpha(c_{i-1}))` over cumulative weights.
pub fn phi_positive(w: &WeightFunction, d: &impl SpectralInput) -> Result<f64> {
    let d = d.distribution()?;
    let min = d.min_value();
    if min < 0.0 {
        if min < -POSITIVITY_SLACK * d.max_value().abs().max(1.0) {
            return Err(Error::NegativeSpectrum(min));
        }
        return Ok(stieltjes_sum(w, &d.positive_part()));
    }
    Ok(stieltjes_sum(w, &d))
}

fn stieltjes_sum(w: &WeightFunction, d: &SpectralDistribution) -> f64 {
    let c = d.cumulative();
    let mut prev_alpha = w.at(0.0);
    let mut terms = Vec::with_capacity(d.len());
    for (&v, &ci) in d.values().iter().zip(&c) {
        let a = w.at(ci);
        terms.push(v * (a - prev_alpha));
        prev_alpha = a;
    }
    kahan_sum(&terms)
}

/// `phi_alpha(a + cI) - c` for an explicit shift `c >= -lambda_min`.
pub fn translatable_with_shift(w: &WeightFunction, d: &SpectralDistribution, c: f64) -> Result<f64> {
    w.require_extension_ready()?;
    Ok(phi_positive(w, &d.shifted(c))? - c)
}

/// Translatable extension with shift `c = max(0, -lambda_min)`; the value is
/// recomputed at `c + 1` and the two must agree.
pub fn phi_translatable(w: &WeightFunction, a: &impl SpectralInput) -> Result<f64> {
    w.require_extension_ready()?;
    let d = a.distribution()?;
    let c = (-d.min_value()).max(0.0);
    let value = translatable_with_shift(w, &d, c)?;
    let check = translatable_with_shift(w, &d, c + 1.0)?;
    let scale = d.max_value().abs() + c + 1.0;
    debug_assert!(
        (value - check).abs() <= SHIFT_INDEPENDENCE_TOL * scale,
        "shift dependence {value} vs {check}"
    );
    let _ = check;
    Ok(value)
}

/// `phi_alpha(a_+) - phi_alpha(a_-)`.
pub fn phi_symmetric(w: &WeightFunction, a: &impl SpectralInput) -> Result<f64> {
    let d = a.distribution()?;
    Ok(phi_positive(w, &d.positive_part())? - phi_positive(w, &d.negative_part())?)
}

/// `phi_alpha(a_+) - phi_dual(a_-)`.
pub fn phi_antisymmetric(w: &WeightFunction, a: &impl SpectralInput) -> Result<f64> {
    w.require_extension_ready()?;
    let dual = w.dual()?;
    let d = a.distribution()?;
    Ok(phi_positive(w, &d.positive_part())? - phi_positive(&dual, &d.negative_part())?)
}

/// `phi^t(Re x) + i phi^t(Im x)`.
pub fn phi_complex(w: &WeightFunction, x: &Matrix) -> Result<C64> {
    let re = phi_translatable(w, &x.real_part())?;
    let im = phi_translatable(w, &x.imag_part())?;
    Ok(C64::new(re, im))
}

/// Evaluates the chosen extension on a square matrix. Real extensions use
/// the Hermitian part.
pub fn evaluate(w: &WeightFunction, kind: ExtensionKind, x: &Matrix) -> Result<TraceValue> {
    let value = match kind {
        ExtensionKind::Complex => phi_complex(w, x)?,
        real => {
            let a = x.real_part();
            C64::new(
                match real {
                    ExtensionKind::Positive => phi_positive(w, &a)?,
                    ExtensionKind::Symmetric => phi_symmetric(w, &a)?,
                    ExtensionKind::Antisymmetric => phi_antisymmetric(w, &a)?,
                    _ => phi_translatable(w, &a)?,
                },
                0.0,
            )
        }
    };
    Ok(TraceValue {
        value,
        weight_name: w.name().to_string(),
        kind,
    })
}

/// `phi_alpha(|x|^p)^{1/p}`.
pub fn alpha_norm(w: &WeightFunction, p: f64, x: &impl ModulusInput) -> Result<f64> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::BadExponent(p));
    }
    let powered = x.modulus()?.map(|v| v.powf(p), 0.0)?;
    Ok(phi_positive(w, &powered)?.powf(1.0 / p))
}

/// Both sides of `phi(e_[k,inf)(a)) <= phi(f(a)) / f(k)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChebyshevCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

pub fn chebyshev_check(
    w: &WeightFunction,
    a: &impl SpectralInput,
    f: impl Fn(f64) -> f64,
    k: f64,
) -> Result<ChebyshevCheck> {
    let fk = f(k);
    if !(fk > 0.0 && fk.is_finite()) {
        return Err(Error::BadThreshold(k));
    }
    let d = a.distribution()?;
    let tol = crate::spectra::distribution::merge_tol_for(d.max_value().abs().max(d.min_value().abs()));
    let indicator = d.map(|v| if v >= k - tol { 1.0 } else { 0.0 }, 0.0)?;
    let lhs = phi_positive(w, &indicator)?;
    let rhs = phi_positive(w, &d.map(&f, 0.0)?)? / fk;
    Ok(ChebyshevCheck {
        lhs,
        rhs,
        holds: lhs <= rhs + CHEBYSHEV_TOL,
    })
}
