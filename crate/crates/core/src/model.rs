//! Continuous probability models and their transformation by invertible,
//! differentiable maps: change-of-variables densities, accuracy-of-measurement
//! rescaling and sampling through the inverse.
//!
//! Orientation: the transform `f` maps raw data `y` to the space the base
//! model is fitted in (`f = log` for a log-Normal), so the transformed
//! density is `base(f(y)) · |f'(y)|` and sampling returns `f⁻¹(x)`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::io::Read;
use std::sync::Arc;

use rand::RngCore;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::domain::Interval;
use crate::error::{Error, Result, Tier};
use crate::function::Function;
use crate::integration::{simpson_with, QuadratureConfig};
use crate::multivariate::VectorFunction;

/// Default accuracy of measurement for data that do not state one.
pub const DEFAULT_AOM: f64 = 1e-6;

/// Half-width of the effective support of Normal-based models, in standard deviations.
pub const SUPPORT_SIGMAS: f64 = 8.0;

pub trait ContinuousModel: Send + Sync {
    fn name(&self) -> String;
    fn density(&self, x: f64) -> Result<f64>;
    fn sample(&self, rng: &mut dyn RngCore) -> Result<f64>;
    fn params(&self) -> Vec<(String, f64)>;
    /// The interval outside which the density mass is negligible.
    fn effective_support(&self) -> Result<Interval>;
    fn transform_name(&self) -> Option<String> {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Normal {
    mu: f64,
    sigma: f64,
}

impl Normal {
    pub fn new(mu: f64, sigma: f64) -> Result<Self> {
        if !mu.is_finite() || !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "Normal needs finite mean and positive sd, got ({mu}, {sigma})"
            )));
        }
        Ok(Normal { mu, sigma })
    }

    /// The standard Normal N(0, 1).
    pub fn n01() -> Self {
        Normal { mu: 0.0, sigma: 1.0 }
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

pub fn normal_pdf(x: f64, mu: f64, sigma: f64) -> f64 {
    let z = (x - mu) / sigma;
    (-0.5 * z * z).exp() / (sigma * (2.0 * PI).sqrt())
}

impl ContinuousModel for Normal {
    fn name(&self) -> String {
        if self.mu == 0.0 && self.sigma == 1.0 {
            "N01".into()
        } else {
            "Normal".into()
        }
    }

    fn density(&self, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return Err(Error::NonFiniteInput {
                function: self.name(),
                x,
            });
        }
        Ok(normal_pdf(x, self.mu, self.sigma))
    }

    fn sample(&self, rng: &mut dyn RngCore) -> Result<f64> {
        let z: f64 = StandardNormal.sample(rng);
        Ok(self.mu + self.sigma * z)
    }

    fn params(&self) -> Vec<(String, f64)> {
        vec![("mu".into(), self.mu), ("sigma".into(), self.sigma)]
    }

    fn effective_support(&self) -> Result<Interval> {
        Interval::new(
            self.mu - SUPPORT_SIGMAS * self.sigma,
            self.mu + SUPPORT_SIGMAS * self.sigma,
        )
    }
}

/// A base model viewed through a transform in the combined tier.
#[derive(Clone)]
pub struct TransformedModel {
    base: Arc<dyn ContinuousModel>,
    map: Function,
    derivative: Function,
    inverse: Function,
}

/// Wraps `base` so that it describes raw data `y` with `f(y)` distributed as `base`.
pub fn transform_model(base: Arc<dyn ContinuousModel>, f: &Function) -> Result<TransformedModel> {
    let missing = match (f.is_invertible(), f.is_differentiable()) {
        (true, true) => None,
        (false, true) => Some(Tier::Invertible),
        (true, false) => Some(Tier::Differentiable),
        (false, false) => Some(Tier::InvertibleAndDifferentiable),
    };
    if let Some(missing) = missing {
        return Err(Error::Capability {
            function: f.describe(),
            missing,
            detail: Some("a model transform needs both an inverse and a derivative".into()),
        });
    }
    Ok(TransformedModel {
        base,
        derivative: f.derivative()?,
        inverse: f.inverse()?,
        map: f.clone(),
    })
}

impl std::fmt::Debug for TransformedModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TransformedModel").field("name", &self.name()).finish()
    }
}

impl TransformedModel {
    pub fn base(&self) -> &Arc<dyn ContinuousModel> {
        &self.base
    }

    pub fn map(&self) -> &Function {
        &self.map
    }
}

impl ContinuousModel for TransformedModel {
    fn name(&self) -> String {
        format!("{}∘{}", self.base.name(), self.map)
    }

    fn density(&self, y: f64) -> Result<f64> {
        Ok(self.base.density(self.map.apply(y)?)? * self.derivative.apply(y)?.abs())
    }

    fn sample(&self, rng: &mut dyn RngCore) -> Result<f64> {
        self.inverse.apply(self.base.sample(rng)?)
    }

    fn params(&self) -> Vec<(String, f64)> {
        self.base.params()
    }

    fn effective_support(&self) -> Result<Interval> {
        let s = self.base.effective_support()?;
        let (a, b) = (self.inverse.apply(s.lo)?, self.inverse.apply(s.hi)?);
        Interval::new(a.min(b), a.max(b))
    }

    fn transform_name(&self) -> Option<String> {
        Some(self.map.describe())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Datum {
    pub value: f64,
    /// Accuracy of measurement: the quantum around `value`.
    pub aom: f64,
}

impl Datum {
    pub fn new(value: f64, aom: f64) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "datum value must be finite, got {value}"
            )));
        }
        if !(aom.is_finite() && aom > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "accuracy of measurement must be positive, got {aom}"
            )));
        }
        Ok(Datum { value, aom })
    }
}

/// `d.aom · |f'(d.value)|`, the datum's measurement quantum after the transform.
pub fn transformed_aom(f: &Function, d: &Datum) -> Result<f64> {
    let slope = f.derivative()?.apply(d.value)?;
    let aom = d.aom * slope.abs();
    if aom == 0.0 {
        return Err(Error::DegenerateAom {
            function: f.describe(),
            x: d.value,
        });
    }
    Ok(aom)
}

/// Normal with the sample mean and the (n-1)-divisor sample standard deviation.
pub fn fit_normal(data: &[Datum]) -> Result<Normal> {
    let values: Vec<f64> = data.iter().map(|d| d.value).collect();
    fit_normal_values(&values)
}

pub fn fit_normal_values(values: &[f64]) -> Result<Normal> {
    let n = values.len();
    if n < 2 {
        return Err(Error::InsufficientData { needed: 2, got: n });
    }
    let (mean, sd) = mean_sd(values);
    if sd == 0.0 {
        return Err(Error::DegenerateSpread { count: n });
    }
    Normal::new(mean, sd)
}

/// Sample mean and (n-1)-divisor standard deviation.
pub fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (n - 1.0)).sqrt())
}

/// Fits a Normal to `f` of the data, then transforms it back to data space.
pub fn fit_transformed(data: &[Datum], f: &Function) -> Result<TransformedModel> {
    let mapped = data.iter().map(|d| f.apply(d.value)).collect::<Result<Vec<f64>>>()?;
    let base = fit_normal_values(&mapped)?;
    transform_model(Arc::new(base), f)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelRecord {
    pub name: String,
    pub params: BTreeMap<String, f64>,
    pub transform_name: Option<String>,
}

pub fn model_record(m: &dyn ContinuousModel) -> ModelRecord {
    ModelRecord {
        name: m.name(),
        params: m.params().into_iter().collect(),
        transform_name: m.transform_name(),
    }
}

/// Reads `value,aom` rows. The header row is optional, `aom` may be left out
/// or blank (it then defaults to [`DEFAULT_AOM`]). Row numbers in errors
/// count data rows from 1.
pub fn read_data_csv(input: impl Read) -> Result<Vec<Datum>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let mut data = Vec::new();
    let mut value_col = 0;
    let mut aom_col = Some(1);
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Data {
            row: data.len() + 1,
            reason: e.to_string(),
        })?;
        if i == 0 && record.get(0).is_some_and(|f| f.parse::<f64>().is_err()) {
            let find = |name: &str| record.iter().position(|h| h.eq_ignore_ascii_case(name));
            value_col = find("value").ok_or_else(|| Error::Data {
                row: 0,
                reason: "header has no 'value' column".into(),
            })?;
            aom_col = find("aom");
            continue;
        }
        let row = data.len() + 1;
        let field = |c: usize| record.get(c).filter(|s| !s.is_empty());
        let value: f64 = field(value_col)
            .ok_or_else(|| Error::Data {
                row,
                reason: "missing value".into(),
            })?
            .parse()
            .map_err(|e| Error::Data {
                row,
                reason: format!("value: {e}"),
            })?;
        let aom = match aom_col.and_then(field) {
            Some(s) => s.parse().map_err(|e| Error::Data {
                row,
                reason: format!("aom: {e}"),
            })?,
            None => DEFAULT_AOM,
        };
        data.push(Datum::new(value, aom).map_err(|e| Error::Data {
            row,
            reason: e.to_string(),
        })?);
    }
    Ok(data)
}

/// Rejects non-positive values, naming the first offending row.
pub fn require_positive(data: &[Datum]) -> Result<()> {
    match data.iter().position(|d| d.value <= 0.0) {
        Some(i) => Err(Error::Data {
            row: i + 1,
            reason: format!("value {} is not positive", data[i].value),
        }),
        None => Ok(()),
    }
}

/// Quadrature settings for normalization checks, whose tolerance is 1e-3:
/// log-transformed supports can span several thousand units, where uniform
/// panels reach 1e-9 only after many more doublings.
pub fn normalization_config() -> QuadratureConfig {
    QuadratureConfig {
        panels: 256,
        max_refinements: 14,
        abs_tol: 1e-7,
    }
}

/// `∫ density` over the model's effective support.
pub fn total_mass(m: &dyn ContinuousModel, cfg: &QuadratureConfig) -> Result<f64> {
    let s = m.effective_support()?;
    total_mass_over(m, s, cfg)
}

pub fn total_mass_over(m: &dyn ContinuousModel, s: Interval, cfg: &QuadratureConfig) -> Result<f64> {
    simpson_with(&|x| m.density(x), s.lo, s.hi, cfg)
}

/// χ² per degree of freedom between a histogram of `samples` and the mass
/// the density assigns to each bin. Bins span the sample range; bins whose
/// expected count is below 5 are left out.
pub fn chi_square_per_dof(
    m: &dyn ContinuousModel,
    samples: &[f64],
    bins: usize,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let lo = samples.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if samples.len() < 2 || bins < 2 || !(hi > lo) {
        return Err(Error::InsufficientData {
            needed: 2,
            got: samples.len(),
        });
    }
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &s in samples {
        let k = (((s - lo) / width) as usize).min(bins - 1);
        counts[k] += 1;
    }
    let n = samples.len() as f64;
    let mut chi2 = 0.0;
    let mut used = 0usize;
    for (k, &c) in counts.iter().enumerate() {
        let a = lo + width * k as f64;
        let expected = n * total_mass_over(m, Interval::new(a, a + width)?, cfg)?;
        if expected < 5.0 {
            continue;
        }
        chi2 += (c as f64 - expected).powi(2) / expected;
        used += 1;
    }
    if used < 2 {
        return Err(Error::InsufficientData { needed: 2, got: used });
    }
    Ok(chi2 / (used - 1) as f64)
}

pub trait MultivariateModel: Send + Sync {
    fn name(&self) -> String;
    fn dim(&self) -> usize;
    fn density(&self, x: &[f64]) -> Result<f64>;
    fn sample(&self, rng: &mut dyn RngCore) -> Result<Vec<f64>>;
}

/// Independent Normal coordinates sharing one standard deviation.
#[derive(Debug, Clone, PartialEq)]
pub struct IsotropicNormal {
    mean: Vec<f64>,
    sigma: f64,
}

impl IsotropicNormal {
    pub fn new(mean: Vec<f64>, sigma: f64) -> Result<Self> {
        if mean.is_empty() || !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::InvalidArgument(
                "isotropic Normal needs a mean and a positive sd".into(),
            ));
        }
        Ok(IsotropicNormal { mean, sigma })
    }

    pub fn standard(dim: usize) -> Self {
        IsotropicNormal {
            mean: vec![0.0; dim],
            sigma: 1.0,
        }
    }
}

impl MultivariateModel for IsotropicNormal {
    fn name(&self) -> String {
        format!("IsotropicNormal{}", self.mean.len())
    }

    fn dim(&self) -> usize {
        self.mean.len()
    }

    fn density(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::Dimension {
                context: "density argument".into(),
                expected: self.dim(),
                found: x.len(),
            });
        }
        Ok(x.iter()
            .zip(&self.mean)
            .map(|(v, m)| normal_pdf(*v, *m, self.sigma))
            .product())
    }

    fn sample(&self, rng: &mut dyn RngCore) -> Result<Vec<f64>> {
        Ok(self
            .mean
            .iter()
            .map(|m| {
                let z: f64 = StandardNormal.sample(rng);
                m + self.sigma * z
            })
            .collect())
    }
}

#[derive(Clone)]
pub struct TransformedMultivariate {
    base: Arc<dyn MultivariateModel>,
    map: VectorFunction,
    inverse: VectorFunction,
}

/// `density(y) = base(f(y)) · |det J_f(y)|`; samples are `f⁻¹` of base samples.
pub fn transform_model_multivariate(
    base: Arc<dyn MultivariateModel>,
    f: &VectorFunction,
) -> Result<TransformedMultivariate> {
    if !f.is_square() || f.n_out() != base.dim() {
        return Err(Error::Dimension {
            context: format!("transform {} of a {}-dimensional model", f.name(), base.dim()),
            expected: base.dim(),
            found: f.n_out(),
        });
    }
    Ok(TransformedMultivariate {
        inverse: f.inverse()?,
        base,
        map: f.clone(),
    })
}

impl std::fmt::Debug for TransformedMultivariate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TransformedMultivariate")
            .field("name", &self.name())
            .finish()
    }
}

impl MultivariateModel for TransformedMultivariate {
    fn name(&self) -> String {
        format!("{}∘{}", self.base.name(), self.map.name())
    }

    fn dim(&self) -> usize {
        self.map.n_in()
    }

    fn density(&self, y: &[f64]) -> Result<f64> {
        Ok(self.base.density(&self.map.apply(y)?)? * self.map.jacobian_determinant(y)?.abs())
    }

    fn sample(&self, rng: &mut dyn RngCore) -> Result<Vec<f64>> {
        self.inverse.apply(&self.base.sample(rng)?)
    }
}

/// `∫∫ density` over a box by nested Simpson quadrature.
pub fn total_mass_2d(m: &dyn MultivariateModel, bounds: [Interval; 2], cfg: &QuadratureConfig) -> Result<f64> {
    if m.dim() != 2 {
        return Err(Error::Dimension {
            context: "two-dimensional quadrature".into(),
            expected: 2,
            found: m.dim(),
        });
    }
    let [b0, b1] = bounds;
    let line = |u: f64| simpson_with(&|v| m.density(&[u, v]), b1.lo, b1.hi, cfg);
    simpson_with(&line, b0.lo, b0.hi, cfg)
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;

    use super::*;
    use crate::catalog::builtins;
    use crate::function::identity;

    fn rng(seed: u64) -> rand::rngs::StdRng {
        rand::rngs::StdRng::seed_from_u64(seed)
    }

    fn lognormal_pdf(y: f64, mu: f64, sigma: f64) -> f64 {
        normal_pdf(y.ln(), mu, sigma) / y
    }

    #[test]
    fn identity_transform_is_a_no_op() {
        let t = transform_model(Arc::new(Normal::n01()), &identity()).unwrap();
        for x in [-3.0, -0.2, 0.0, 1.7] {
            assert!((t.density(x).unwrap() - Normal::n01().density(x).unwrap()).abs() <= 1e-12);
        }
        let (mut a, mut b) = (rng(3), rng(3));
        for _ in 0..100 {
            assert_eq!(t.sample(&mut a).unwrap(), Normal::n01().sample(&mut b).unwrap());
        }
    }

    #[test]
    fn log_transform_is_lognormal() {
        let t = transform_model(Arc::new(Normal::new(0.3, 0.7).unwrap()), &builtins::log()).unwrap();
        for y in [0.05, 0.5, 1.0, 2.0, 9.0] {
            assert!((t.density(y).unwrap() - lognormal_pdf(y, 0.3, 0.7)).abs() <= 1e-10);
        }
    }

    #[test]
    fn transform_requires_both_capabilities() {
        let err = transform_model(Arc::new(Normal::n01()), &builtins::sin()).unwrap_err();
        assert!(matches!(
            err,
            Error::Capability {
                missing: Tier::Invertible,
                ..
            }
        ));
        let err = transform_model(Arc::new(Normal::n01()), &builtins::floor()).unwrap_err();
        assert!(matches!(
            err,
            Error::Capability {
                missing: Tier::InvertibleAndDifferentiable,
                ..
            }
        ));
    }

    #[test]
    fn lognormal_sampling_recovers_log_mean() {
        let t = transform_model(Arc::new(Normal::new(0.5, 0.2).unwrap()), &builtins::log()).unwrap();
        let mut r = rng(11);
        let logs: Vec<f64> = (0..100_000).map(|_| t.sample(&mut r).unwrap().ln()).collect();
        let (m, _) = mean_sd(&logs);
        assert!((m - 0.5).abs() <= 0.01, "{m}");
    }

    #[test]
    fn aom_examples() {
        let d = |v, a| Datum::new(v, a).unwrap();
        assert_eq!(transformed_aom(&identity(), &d(3.0, 0.1)).unwrap(), 0.1);
        assert!((transformed_aom(&builtins::log(), &d(2.0, 0.1)).unwrap() - 0.05).abs() <= 1e-6);
        assert!((transformed_aom(&builtins::exp(), &d(0.0, 0.01)).unwrap() - 0.01).abs() <= 1e-6);
        assert!(matches!(
            transformed_aom(&builtins::sqr_real(), &d(0.0, 0.1)),
            Err(Error::DegenerateAom { .. })
        ));
        assert!(Datum::new(1.0, 0.0).is_err());
    }

    #[test]
    fn fit_normal_examples() {
        let data = |v: &[f64]| v.iter().map(|&x| Datum::new(x, 0.01).unwrap()).collect::<Vec<_>>();
        assert!(matches!(
            fit_normal(&data(&[0.0; 4])),
            Err(Error::DegenerateSpread { count: 4 })
        ));
        let n = fit_normal(&data(&[1.0, 2.0, 3.0])).unwrap();
        assert_eq!((n.mu(), n.sigma()), (2.0, 1.0));
        assert!(matches!(
            fit_normal(&data(&[1.0])),
            Err(Error::InsufficientData { needed: 2, got: 1 })
        ));
    }

    #[test]
    fn fitted_lognormal_matches_closed_form() {
        let data: Vec<Datum> = [0.5, 1.2, 2.0, 3.3, 0.9]
            .iter()
            .map(|&v| Datum::new(v, 0.01).unwrap())
            .collect();
        let t = fit_transformed(&data, &builtins::log()).unwrap();
        let logs: Vec<f64> = data.iter().map(|d| d.value.ln()).collect();
        let (m, s) = mean_sd(&logs);
        for y in [0.3, 1.0, 4.0] {
            assert!((t.density(y).unwrap() - lognormal_pdf(y, m, s)).abs() <= 1e-10);
        }
        let rec = model_record(&t);
        assert_eq!(rec.transform_name.as_deref(), Some("log"));
        assert_eq!(rec.params["mu"], m);
        let back: ModelRecord = serde_json::from_str(&serde_json::to_string(&rec).unwrap()).unwrap();
        assert_eq!(back, rec);
    }

    #[test]
    fn normalization() {
        let cfg = normalization_config();
        for base in [
            Normal::n01(),
            Normal::new(1.0, 0.5).unwrap(),
            Normal::new(-0.5, 0.3).unwrap(),
        ] {
            assert!((total_mass(&base, &cfg).unwrap() - 1.0).abs() <= 1e-3);
            let t = transform_model(Arc::new(base), &builtins::log()).unwrap();
            assert!((total_mass(&t, &cfg).unwrap() - 1.0).abs() <= 1e-3);
        }
        let t = transform_model(Arc::new(Normal::n01()), &builtins::succ()).unwrap();
        assert!((total_mass(&t, &cfg).unwrap() - 1.0).abs() <= 1e-3);
    }

    #[test]
    fn csv_ingestion() {
        let data = read_data_csv("value,aom\n1.5,0.1\n2.0,\n".as_bytes()).unwrap();
        assert_eq!(
            data,
            vec![Datum::new(1.5, 0.1).unwrap(), Datum::new(2.0, DEFAULT_AOM).unwrap()]
        );
        let data = read_data_csv("3.0\n4.0\n".as_bytes()).unwrap();
        assert_eq!(data.len(), 2);
        match read_data_csv("value\n1\nx\n".as_bytes()) {
            Err(Error::Data { row, .. }) => assert_eq!(row, 2),
            other => panic!("{other:?}"),
        }
        let data = read_data_csv("value\n1\n-2\n".as_bytes()).unwrap();
        assert!(matches!(require_positive(&data), Err(Error::Data { row: 2, .. })));
    }

    #[test]
    fn polar_view_of_a_plane_normal() {
        let t =
            transform_model_multivariate(Arc::new(IsotropicNormal::standard(2)), &builtins::polar2cartesian()).unwrap();
        for (r, th) in [(0.5, 0.0), (1.0, 2.0), (2.5, -1.0)] {
            let expected = r / (2.0 * PI) * (-r * r / 2.0f64).exp();
            assert!((t.density(&[r, th]).unwrap() - expected).abs() <= 1e-8);
        }
        let cfg = QuadratureConfig::new(64, 8, 1e-6).unwrap();
        let bounds = [Interval::new(0.0, 6.0).unwrap(), Interval::new(-PI, PI).unwrap()];
        let mass = total_mass_2d(&t, bounds, &cfg).unwrap();
        assert!((mass - 1.0).abs() <= 1e-3, "{mass}");
    }

    #[test]
    fn identity_map_transform_is_a_no_op() {
        let base = IsotropicNormal::new(vec![0.5, -1.0], 2.0).unwrap();
        let t = transform_model_multivariate(Arc::new(base.clone()), &crate::multivariate::identity_map(2)).unwrap();
        for p in [[0.0, 0.0], [1.0, -3.0]] {
            assert!((t.density(&p).unwrap() - base.density(&p).unwrap()).abs() <= 1e-12);
        }
        assert!(transform_model_multivariate(Arc::new(base), &crate::multivariate::identity_map(3)).is_err());
    }

    #[test]
    fn samples_match_density() {
        let t = transform_model(Arc::new(Normal::new(1.0, 0.5).unwrap()), &builtins::log()).unwrap();
        let mut r = rng(5);
        let s: Vec<f64> = (0..100_000).map(|_| t.sample(&mut r).unwrap()).collect();
        let chi = chi_square_per_dof(&t, &s, 20, &QuadratureConfig::default()).unwrap();
        assert!(chi < 2.0, "{chi}");
    }
}
