//! Weight functions `alpha: [0, 1] -> [0, 1]` that turn the trace of a
//! spectral projection into a weighted dimension.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

type Evaluator = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Tolerance for the grid-based shape tests.
pub const SHAPE_TOL: f64 = 1e-10;
/// Number of grid points used when validating user-supplied weights.
pub const VALIDATION_GRID: usize = 1001;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Shape {
    Linear,
    Concave,
    Convex,
    Neither,
    Unknown,
}

impl Shape {
    /// Shape of the dual weight.
    pub fn flipped(self) -> Shape {
        match self {
            Shape::Concave => Shape::Convex,
            Shape::Convex => Shape::Concave,
            other => other,
        }
    }

    /// Linear weights are both concave and convex.
    pub fn is_concave(self) -> bool {
        matches!(self, Shape::Concave | Shape::Linear)
    }

    pub fn is_convex(self) -> bool {
        matches!(self, Shape::Convex | Shape::Linear)
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Shape::Linear => "linear",
            Shape::Concave => "concave",
            Shape::Convex => "convex",
            Shape::Neither => "neither",
            Shape::Unknown => "unknown",
        };
        f.write_str(s)
    }
}

/// A monotone weight with `alpha(0) = 0` and (except for `kyfan`)
/// `alpha(1) = 1`.
#[derive(Clone)]
pub struct WeightFunction {
    name: String,
    eval: Evaluator,
    shape: Shape,
    continuous: bool,
    dual_form: Option<Evaluator>,
}

impl fmt::Debug for WeightFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WeightFunction")
            .field("name", &self.name)
            .field("shape", &self.shape)
            .field("continuous", &self.continuous)
            .finish_non_exhaustive()
    }
}

impl WeightFunction {
    /// Wraps a user-supplied continuous weight. The endpoints and
    /// monotonicity are checked on a uniform grid and the shape is
    /// classified numerically.
    pub fn custom<F>(name: impl Into<String>, f: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let name = name.into();
        let eval: Evaluator = Arc::new(f);
        validate(&name, &eval, true)?;
        let mut w = WeightFunction {
            name,
            eval,
            shape: Shape::Unknown,
            continuous: true,
            dual_form: None,
        };
        w.shape = classify_shape(&w, VALIDATION_GRID);
        Ok(w)
    }

    fn known(name: String, shape: Shape, f: Evaluator, dual: Option<Evaluator>) -> Self {
        WeightFunction {
            name,
            eval: f,
            shape,
            continuous: true,
            dual_form: dual,
        }
    }

    pub fn identity() -> Self {
        Self::known("identity".into(), Shape::Linear, Arc::new(|t| t), Some(Arc::new(|t| t)))
    }

    pub fn sqrt() -> Self {
        Self::known(
            "sqrt".into(),
            Shape::Concave,
            Arc::new(f64::sqrt),
            Some(Arc::new(|t: f64| 1.0 - (1.0 - t).sqrt())),
        )
    }

    pub fn square() -> Self {
        Self::known(
            "square".into(),
            Shape::Convex,
            Arc::new(|t| t * t),
            Some(Arc::new(|t| 2.0 * t - t * t)),
        )
    }

    /// `t^p` for `p > 0`.
    pub fn power(p: f64) -> Result<Self> {
        if !(p.is_finite() && p > 0.0) {
            return Err(Error::BadParam(format!("power exponent must be positive, got {p}")));
        }
        let shape = if p == 1.0 {
            Shape::Linear
        } else if p < 1.0 {
            Shape::Concave
        } else {
            Shape::Convex
        };
        Ok(Self::known(
            format!("power:{p}"),
            shape,
            Arc::new(move |t: f64| t.powf(p)),
            Some(Arc::new(move |t: f64| 1.0 - (1.0 - t).powf(p))),
        ))
    }

    /// `min(x, t0)`: integrates the top `t0` of the spectrum. Its total mass
    /// is `t0`, not 1.
    pub fn kyfan(t0: f64) -> Result<Self> {
        if !(t0 > 0.0 && t0 <= 1.0) {
            return Err(Error::BadParam(format!("kyfan level must lie in (0, 1], got {t0}")));
        }
        Ok(Self::known(
            format!("kyfan:{t0}"),
            Shape::Concave,
            Arc::new(move |x: f64| x.min(t0)),
            None,
        ))
    }

    /// Jumps from 0 to 1 at `0+`; recovers the operator norm on positives.
    pub fn supnorm() -> Self {
        WeightFunction {
            name: "supnorm".into(),
            eval: Arc::new(|t| if t > 0.0 { 1.0 } else { 0.0 }),
            shape: Shape::Concave,
            continuous: false,
            dual_form: None,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn is_continuous(&self) -> bool {
        self.continuous
    }

    /// `alpha(1)`; equal to 1 for every weight except `kyfan`.
    pub fn total_mass(&self) -> f64 {
        (self.eval)(1.0)
    }

    pub fn is_normalized(&self) -> bool {
        (self.total_mass() - 1.0).abs() <= 1e-12
    }

    /// Evaluates without domain checks; callers guarantee `t` in `[0, 1]`.
    #[inline]
    pub fn at(&self, t: f64) -> f64 {
        (self.eval)(t)
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::Domain(t));
        }
        Ok((self.eval)(t))
    }

    /// `t -> alpha(1) - alpha(1 - t)`.
    pub fn dual(&self) -> Result<WeightFunction> {
        if !self.continuous {
            return Err(Error::DiscontinuousWeight(self.name.clone()));
        }
        let eval = match &self.dual_form {
            Some(d) => Arc::clone(d),
            None => {
                let inner = Arc::clone(&self.eval);
                let total = self.total_mass();
                Arc::new(move |t: f64| total - inner(1.0 - t)) as Evaluator
            }
        };
        let name = match self.name.strip_prefix("dual(").and_then(|s| s.strip_suffix(')')) {
            Some(inner) => inner.to_string(),
            None => format!("dual({})", self.name),
        };
        Ok(WeightFunction {
            name,
            eval,
            shape: self.shape.flipped(),
            continuous: true,
            dual_form: Some(Arc::clone(&self.eval)),
        })
    }

    /// Continuity is required by the signed extensions and the dual.
    pub fn require_continuous(&self) -> Result<()> {
        if !self.continuous {
            return Err(Error::DiscontinuousWeight(self.name.clone()));
        }
        Ok(())
    }

    /// Continuous and `alpha(1) = 1`: the standing hypothesis of the signed
    /// extensions.
    pub fn require_extension_ready(&self) -> Result<()> {
        self.require_continuous()?;
        if !self.is_normalized() {
            return Err(Error::UnnormalizedWeight(self.name.clone()));
        }
        Ok(())
    }

    pub fn require_concave(&self) -> Result<()> {
        if !self.shape.is_concave() {
            return Err(Error::Shape {
                name: self.name.clone(),
                required: "concave",
            });
        }
        Ok(())
    }
}

fn validate(name: &str, eval: &Evaluator, normalized: bool) -> Result<()> {
    let at0 = eval(0.0);
    if at0 != 0.0 {
        return Err(Error::InvalidWeight(format!("{name}: alpha(0) = {at0}, expected 0")));
    }
    let at1 = eval(1.0);
    if normalized && (at1 - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidWeight(format!("{name}: alpha(1) = {at1}, expected 1")));
    }
    let mut prev = at0;
    for i in 1..VALIDATION_GRID {
        let t = i as f64 / (VALIDATION_GRID - 1) as f64;
        let v = eval(t);
        if !v.is_finite() || v < prev - 1e-12 || !(-1e-12..=1.0 + 1e-12).contains(&v) {
            return Err(Error::InvalidWeight(format!(
                "{name}: not a monotone map into [0, 1] near t = {t}"
            )));
        }
        prev = v;
    }
    Ok(())
}

pub fn eval_weight(w: &WeightFunction, t: f64) -> Result<f64> {
    w.eval(t)
}

pub fn dual_weight(w: &WeightFunction) -> Result<WeightFunction> {
    w.dual()
}

/// Numerical shape test: midpoint concavity/convexity over all pairs of
/// grid points with an even index gap, tolerance [`SHAPE_TOL`].
pub fn classify_shape(w: &WeightFunction, grid_size: usize) -> Shape {
    let g = grid_size.max(3);
    let vals: Vec<f64> = (0..g).map(|i| w.at(i as f64 / (g - 1) as f64)).collect();
    let mut concave = true;
    let mut convex = true;
    for i in 0..g {
        for j in (i + 2..g).step_by(2) {
            let mid = vals[(i + j) / 2];
            let chord = 0.5 * (vals[i] + vals[j]);
            if mid < chord - SHAPE_TOL {
                concave = false;
            }
            if mid > chord + SHAPE_TOL {
                convex = false;
            }
        }
        if !concave && !convex {
            return Shape::Neither;
        }
    }
    match (concave, convex) {
        (true, true) => Shape::Linear,
        (true, false) => Shape::Concave,
        (false, true) => Shape::Convex,
        (false, false) => Shape::Neither,
    }
}

/// Resolves a weight name: `identity`, `sqrt`, `square`, `power` (param p),
/// `kyfan` (param t0), `supnorm`.
pub fn builtin_weight(name: &str, param: Option<f64>) -> Result<WeightFunction> {
    let need = |what: &str| param.ok_or_else(|| Error::BadParam(format!("weight '{name}' needs a {what} parameter")));
    match name {
        "identity" => Ok(WeightFunction::identity()),
        "sqrt" => Ok(WeightFunction::sqrt()),
        "square" => Ok(WeightFunction::square()),
        "supnorm" => Ok(WeightFunction::supnorm()),
        "power" => WeightFunction::power(need("exponent")?),
        "kyfan" => WeightFunction::kyfan(need("level")?),
        other => Err(Error::UnknownWeight(other.to_string())),
    }
}

/// Parses the command-line selection syntax, e.g. `sqrt`, `power:0.5`,
/// `kyfan:0.25`.
pub fn parse_weight(input: &str) -> Result<WeightFunction> {
    let input = input.trim();
    let (name, param) = match input.split_once(':') {
        Some((n, p)) => {
            let v: f64 = p
                .trim()
                .parse()
                .map_err(|_| Error::BadParam(format!("cannot parse '{p}' as a number")))?;
            (n.trim(), Some(v))
        }
        None => (input, None),
    };
    builtin_weight(name, param)
}

/// `nu_alpha([lo, hi)) = alpha(hi) - alpha(lo)`.
pub fn stieltjes_increment(w: &WeightFunction, lo: f64, hi: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&lo) {
        return Err(Error::Domain(lo));
    }
    if !(lo..=1.0).contains(&hi) {
        return Err(Error::Domain(hi));
    }
    Ok(w.at(hi) - w.at(lo))
}
