//! Spectral equivalence criteria.
//!
//! Two isotropic kernels on `S^{d-1}` with Schoenberg coefficients `a₁`, `a₂` give equivalent
//! Gaussian measures iff `Σ_k h(k)(1 − a₁(k)/a₂(k))²` is finite. On a homogeneous space with
//! atomic spectral measures the same role is played by `Σ_n d(aₙ)(1 − μ₁({aₙ})/μ₂({aₙ}))²`
//! over a shared atom set; with all dimensions equal to one this is the criterion for
//! stationary processes on locally compact abelian groups.
//!
//! A finite computation cannot decide convergence of an infinite series on its own. A verdict
//! of [`SeriesVerdict::Finite`] or [`SeriesVerdict::Divergent`] is only issued when the
//! series is completely covered by the data or when a closed-form [`RatioModel`] supplies
//! rigorous tail bounds.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{contract, GpError, Result};
use crate::kernels::{harmonic_dimension, harmonic_dimension_f64, SchoenbergSpectrum};

/// One atom of a spectral measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Atom {
    pub label: String,
    pub mass: f64,
    pub dim: u64,
}

/// Ordered list of atoms with strictly positive masses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MeasureRepr", into = "MeasureRepr")]
pub struct AtomicSpectralMeasure {
    atoms: Vec<Atom>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MeasureRepr {
    atoms: Vec<Atom>,
}

impl TryFrom<MeasureRepr> for AtomicSpectralMeasure {
    type Error = GpError;
    fn try_from(r: MeasureRepr) -> Result<Self> {
        Self::new(r.atoms)
    }
}

impl From<AtomicSpectralMeasure> for MeasureRepr {
    fn from(m: AtomicSpectralMeasure) -> Self {
        Self { atoms: m.atoms }
    }
}

impl AtomicSpectralMeasure {
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        let mut seen = HashSet::new();
        for (i, a) in atoms.iter().enumerate() {
            if !seen.insert(a.label.as_str()) {
                return Err(contract(format!("duplicate atom label {:?}", a.label)));
            }
            if !(a.mass > 0.0 && a.mass.is_finite()) {
                return Err(contract(format!("atom {i} ({}) has non-positive mass {}", a.label, a.mass)));
            }
            if a.dim == 0 {
                return Err(contract(format!("atom {i} ({}) has dimension 0", a.label)));
            }
        }
        Ok(Self { atoms })
    }

    /// Atoms of a Schoenberg spectrum: label `k<degree>`, dimension `h(k)`, mass `a(k)·h(k)`.
    /// Degrees with `a(k) = 0` carry no atom.
    pub fn from_spectrum(s: &SchoenbergSpectrum) -> Result<Self> {
        let mut atoms = Vec::new();
        for (k, &a) in s.coeffs().iter().enumerate() {
            if a > 0.0 {
                let h = harmonic_dimension(s.sphere_dim(), k)?;
                atoms.push(Atom {
                    label: format!("k{k}"),
                    mass: a * h as f64,
                    dim: h,
                });
            }
        }
        Self::new(atoms)
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }
}

/// Closed-form ratio `r(i) = 1 + scale·(i+1)^(−exponent)` for the i-th term (0-based),
/// i.e. `a₁(k)/a₂(k)` at degree `k = i` or `μ₁/μ₂` at the `(i+1)`-th atom.
///
/// `exponent = 0` is the constant-ratio model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatioModel {
    pub scale: f64,
    pub exponent: f64,
}

impl RatioModel {
    pub fn new(scale: f64, exponent: f64) -> Result<Self> {
        let m = Self { scale, exponent };
        m.validate()?;
        Ok(m)
    }

    /// Model with `r ≡ ratio`.
    pub fn constant(ratio: f64) -> Result<Self> {
        Self::new(ratio - 1.0, 0.0)
    }

    fn validate(&self) -> Result<()> {
        if !(self.exponent >= 0.0 && self.exponent.is_finite()) {
            return Err(contract(format!("ratio exponent must be >= 0, got {}", self.exponent)));
        }
        if !(self.scale > -1.0 && self.scale.is_finite()) {
            return Err(contract(format!("ratio scale must exceed -1, got {}", self.scale)));
        }
        Ok(())
    }

    pub fn ratio(&self, i: usize) -> f64 {
        1.0 + self.scale * ((i + 1) as f64).powf(-self.exponent)
    }
}

/// Growth of the multiplicities `d(aₙ)` used for tail bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum DimensionModel {
    /// Every atom has the same dimension.
    Constant(u64),
    /// Dimension `h(k)` of degree-`k` harmonics on `S^{d-1}`.
    Sphere(usize),
}

impl DimensionModel {
    fn dim(&self, i: usize) -> f64 {
        match *self {
            DimensionModel::Constant(c) => c as f64,
            DimensionModel::Sphere(d) => harmonic_dimension_f64(d, i),
        }
    }

    /// `(lower, upper, q)` with `lower·(i+1)^q ≤ dim(i) ≤ upper·(i+1)^q` for all `i ≥ 0`.
    fn power_envelope(&self) -> (f64, f64, f64) {
        match *self {
            DimensionModel::Constant(c) => (c as f64, c as f64, 0.0),
            DimensionModel::Sphere(d) => {
                // h(k) = (2k+d−2)/(d−2)! · Π_{j=1}^{d−3}(k+j). Each factor lies between (k+1)
                // and (d−2)(k+1), and 2k+d−2 between (k+1) and 2(d−2)(k+1).
                let m = (d - 2) as f64;
                let fact: f64 = (1..=(d - 2)).map(|j| j as f64).product();
                (1.0 / fact, 2.0 * m.powi((d - 2) as i32) / fact, m)
            }
        }
    }
}

/// Outcome of a series test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SeriesVerdict {
    Finite,
    Divergent,
    Inconclusive,
}

/// Terms and partial sums of a criterion series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    /// Degree `k` (sphere) or 1-based atom position `n` (Chow) of each term.
    pub indices: Vec<usize>,
    pub terms: Vec<f64>,
    pub partial_sums: Vec<f64>,
    #[serde(rename = "final")]
    pub final_value: f64,
    pub verdict: SeriesVerdict,
    /// Upper bound on the omitted tail when the verdict is `Finite`.
    pub tail_bound: Option<f64>,
}

fn model_verdict(model: &RatioModel, dims: DimensionModel, computed: usize) -> (SeriesVerdict, Option<f64>) {
    if model.scale == 0.0 {
        return (SeriesVerdict::Finite, Some(0.0));
    }
    // term(i) = dim(i)·c²·(i+1)^(−2s), bounded by C·(i+1)^(−p) with p = 2s − q.
    let (lower, upper, q) = dims.power_envelope();
    let p = 2.0 * model.exponent - q;
    let c2 = model.scale * model.scale;
    if p > 1.0 {
        // Σ_{i ≥ computed} (i+1)^(−p) ≤ ∫_{computed}^∞ x^(−p) dx
        let start = computed.max(1) as f64;
        let tail = c2 * upper * start.powf(1.0 - p) / (p - 1.0);
        (SeriesVerdict::Finite, Some(tail))
    } else if lower > 0.0 {
        (SeriesVerdict::Divergent, None)
    } else {
        (SeriesVerdict::Inconclusive, None)
    }
}

fn accumulate(indices: Vec<usize>, terms: Vec<f64>, verdict: (SeriesVerdict, Option<f64>)) -> CriterionResult {
    let mut partial_sums = Vec::with_capacity(terms.len());
    let mut acc = 0.0;
    for t in &terms {
        acc += t;
        partial_sums.push(acc);
    }
    CriterionResult {
        indices,
        terms,
        partial_sums,
        final_value: acc,
        verdict: verdict.0,
        tail_bound: verdict.1,
    }
}

fn check_model_ratio(model: &RatioModel, i: usize, observed: f64) -> Result<()> {
    let expected = model.ratio(i);
    if (observed - expected).abs() > 1e-9 * expected {
        return Err(contract(format!(
            "ratio {observed} at term {i} disagrees with the model value {expected}"
        )));
    }
    Ok(())
}

/// Partial sums of `Σ_{k ≤ K} h(k)(1 − a₁(k)/a₂(k))²`.
///
/// Degrees where both coefficients vanish contribute zero. A degree where exactly one
/// coefficient vanishes means the spectra do not share their atoms, reported as
/// [`GpError::AtomMismatch`]. Without a model the verdict is `Finite` when `K` covers both
/// lists entirely and `Inconclusive` otherwise.
pub fn sphere_equivalence_sum(
    s1: &SchoenbergSpectrum,
    s2: &SchoenbergSpectrum,
    k_max: usize,
) -> Result<CriterionResult> {
    sphere_sum_impl(s1, s2, k_max, None)
}

/// As [`sphere_equivalence_sum`], with a closed-form ratio model deciding the tail.
/// The model is checked against the explicit coefficients at every computed degree.
pub fn sphere_equivalence_sum_with_model(
    s1: &SchoenbergSpectrum,
    s2: &SchoenbergSpectrum,
    k_max: usize,
    model: &RatioModel,
) -> Result<CriterionResult> {
    model.validate()?;
    sphere_sum_impl(s1, s2, k_max, Some(model))
}

fn sphere_sum_impl(
    s1: &SchoenbergSpectrum,
    s2: &SchoenbergSpectrum,
    k_max: usize,
    model: Option<&RatioModel>,
) -> Result<CriterionResult> {
    let d = s1.sphere_dim();
    if s2.sphere_dim() != d {
        return Err(contract(format!("spectra live on different spheres: d = {d} vs {}", s2.sphere_dim())));
    }
    let mut indices = Vec::with_capacity(k_max + 1);
    let mut terms = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        let (a1, a2) = (s1.coeff(k), s2.coeff(k));
        let term = match (a1 > 0.0, a2 > 0.0) {
            (false, false) => 0.0,
            (true, true) => {
                let r = a1 / a2;
                if let Some(m) = model {
                    check_model_ratio(m, k, r)?;
                }
                harmonic_dimension_f64(d, k) * (1.0 - r) * (1.0 - r)
            }
            _ => {
                return Err(GpError::AtomMismatch {
                    index: k,
                    detail: format!("a1({k}) = {a1}, a2({k}) = {a2}"),
                })
            }
        };
        indices.push(k);
        terms.push(term);
    }
    let verdict = match model {
        Some(m) => model_verdict(m, DimensionModel::Sphere(d), k_max + 1),
        None => {
            let support = s1.coeffs().len().max(s2.coeffs().len());
            if k_max + 1 >= support {
                (SeriesVerdict::Finite, Some(0.0))
            } else {
                (SeriesVerdict::Inconclusive, None)
            }
        }
    };
    Ok(accumulate(indices, terms, verdict))
}

/// Partial sums of `Σ_{n ≤ N} d(aₙ)(1 − μ₁({aₙ})/μ₂({aₙ}))²` over atoms aligned by position.
///
/// The n-th atoms of both measures must carry the same label, otherwise the measures do not
/// share their atoms and [`GpError::AtomMismatch`] is returned. Without a model the verdict
/// is `Finite` when `N` covers both measures entirely and `Inconclusive` otherwise.
pub fn chow_sum(m1: &AtomicSpectralMeasure, m2: &AtomicSpectralMeasure, n_max: usize) -> Result<CriterionResult> {
    chow_impl(m1, m2, n_max, None)
}

/// As [`chow_sum`], with a ratio model and dimension growth model deciding the tail.
pub fn chow_sum_with_model(
    m1: &AtomicSpectralMeasure,
    m2: &AtomicSpectralMeasure,
    n_max: usize,
    model: &RatioModel,
    dims: DimensionModel,
) -> Result<CriterionResult> {
    model.validate()?;
    if let DimensionModel::Sphere(d) = dims {
        if d < 3 {
            return Err(contract("sphere dimension model needs d >= 3"));
        }
    }
    chow_impl(m1, m2, n_max, Some((model, dims)))
}

fn chow_impl(
    m1: &AtomicSpectralMeasure,
    m2: &AtomicSpectralMeasure,
    n_max: usize,
    model: Option<(&RatioModel, DimensionModel)>,
) -> Result<CriterionResult> {
    let covered = n_max.min(m1.len()).min(m2.len());
    if n_max > covered && m1.len() != m2.len() {
        let (longer, which) = if m1.len() > m2.len() { (m1, 1) } else { (m2, 2) };
        return Err(GpError::AtomMismatch {
            index: covered,
            detail: format!(
                "atom {:?} of measure {which} has no counterpart",
                longer.atoms[covered].label
            ),
        });
    }
    let mut indices = Vec::with_capacity(covered);
    let mut terms = Vec::with_capacity(covered);
    for (i, (a, b)) in m1.atoms.iter().zip(&m2.atoms).take(covered).enumerate() {
        if a.label != b.label {
            return Err(GpError::AtomMismatch {
                index: i,
                detail: format!("labels {:?} and {:?} differ", a.label, b.label),
            });
        }
        if a.dim != b.dim {
            return Err(contract(format!(
                "atom {:?} has dimension {} in one measure and {} in the other",
                a.label, a.dim, b.dim
            )));
        }
        let r = a.mass / b.mass;
        if let Some((m, dims)) = model {
            check_model_ratio(m, i, r)?;
            if (dims.dim(i) - a.dim as f64).abs() > 1e-9 * a.dim as f64 {
                return Err(contract(format!(
                    "atom {:?} has dimension {} but the model expects {}",
                    a.label,
                    a.dim,
                    dims.dim(i)
                )));
            }
        }
        indices.push(i + 1);
        terms.push(a.dim as f64 * (1.0 - r) * (1.0 - r));
    }
    let verdict = match model {
        Some((m, dims)) => model_verdict(m, dims, covered),
        None if covered == m1.len() && covered == m2.len() => (SeriesVerdict::Finite, Some(0.0)),
        None => (SeriesVerdict::Inconclusive, None),
    };
    Ok(accumulate(indices, terms, verdict))
}

/// True iff both measures have the same set of atom labels.
pub fn check_shared_atoms(m1: &AtomicSpectralMeasure, m2: &AtomicSpectralMeasure) -> bool {
    let a: HashSet<&str> = m1.atoms.iter().map(|x| x.label.as_str()).collect();
    let b: HashSet<&str> = m2.atoms.iter().map(|x| x.label.as_str()).collect();
    a == b
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atoms(spec: &[(&str, f64, u64)]) -> AtomicSpectralMeasure {
        AtomicSpectralMeasure::new(
            spec.iter()
                .map(|&(l, m, d)| Atom {
                    label: l.to_string(),
                    mass: m,
                    dim: d,
                })
                .collect(),
        )
        .unwrap()
    }

    fn power_spectrum(k_max: usize, p: f64) -> SchoenbergSpectrum {
        SchoenbergSpectrum::new(3, (0..=k_max).map(|k| ((k + 1) as f64).powf(-p)).collect()).unwrap()
    }

    #[test]
    fn identical_spectra() {
        let s = power_spectrum(20, 3.0);
        let r = sphere_equivalence_sum(&s, &s, 20).unwrap();
        assert!(r.partial_sums.iter().all(|&v| v == 0.0));
        assert_eq!(r.verdict, SeriesVerdict::Finite);
    }

    #[test]
    fn constant_ratio_diverges() {
        let k_max = 50;
        let s2 = power_spectrum(k_max, 2.0);
        let s1 = s2.scaled(4.0).unwrap();
        let model = RatioModel::constant(4.0).unwrap();
        let r = sphere_equivalence_sum_with_model(&s1, &s2, k_max, &model).unwrap();
        let expected = 9.0 * ((k_max + 1) * (k_max + 1)) as f64;
        assert!((r.final_value - expected).abs() < 1e-9 * expected);
        assert_eq!(r.verdict, SeriesVerdict::Divergent);
        assert!(r.tail_bound.is_none());
    }

    #[test]
    fn truncated_without_model_is_inconclusive() {
        let s1 = power_spectrum(10, 2.0);
        let s2 = power_spectrum(10, 3.0);
        assert_eq!(sphere_equivalence_sum(&s1, &s2, 5).unwrap().verdict, SeriesVerdict::Inconclusive);
        assert_eq!(sphere_equivalence_sum(&s1, &s2, 10).unwrap().verdict, SeriesVerdict::Finite);
        assert_eq!(sphere_equivalence_sum(&s1, &s2, 30).unwrap().verdict, SeriesVerdict::Finite);
    }

    #[test]
    fn support_mismatch() {
        let s1 = SchoenbergSpectrum::new(3, vec![1.0, 0.0, 1.0]).unwrap();
        let s2 = SchoenbergSpectrum::new(3, vec![1.0, 0.5, 1.0]).unwrap();
        match sphere_equivalence_sum(&s1, &s2, 2) {
            Err(GpError::AtomMismatch { index, .. }) => assert_eq!(index, 1),
            other => panic!("unexpected {other:?}"),
        }
        let s3 = SchoenbergSpectrum::new(3, vec![1.0, 0.0]).unwrap();
        let s4 = SchoenbergSpectrum::new(3, vec![2.0, 0.0, 0.0]).unwrap();
        assert!(sphere_equivalence_sum(&s3, &s4, 2).is_ok());
    }

    #[test]
    fn model_must_match_data() {
        let s2 = power_spectrum(10, 2.0);
        let s1 = s2.scaled(2.0).unwrap();
        let wrong = RatioModel::constant(3.0).unwrap();
        assert!(matches!(
            sphere_equivalence_sum_with_model(&s1, &s2, 10, &wrong),
            Err(GpError::Contract(_))
        ));
        assert!(RatioModel::new(-1.5, 1.0).is_err());
        assert!(RatioModel::new(1.0, -1.0).is_err());
    }

    #[test]
    fn dimension_envelope_holds() {
        for d in 3..=8 {
            let (lo, hi, q) = DimensionModel::Sphere(d).power_envelope();
            for k in 0..500 {
                let h = harmonic_dimension_f64(d, k);
                let base = ((k + 1) as f64).powf(q);
                assert!(lo * base <= h * (1.0 + 1e-12), "d={d} k={k}");
                assert!(h <= hi * base * (1.0 + 1e-12), "d={d} k={k}");
            }
        }
    }

    #[test]
    fn chow_identical_and_mismatch() {
        let m = atoms(&[("a", 1.0, 1), ("b", 2.0, 3)]);
        let r = chow_sum(&m, &m, 2).unwrap();
        assert_eq!(r.final_value, 0.0);
        assert_eq!(r.verdict, SeriesVerdict::Finite);

        let extra = atoms(&[("a", 1.0, 1), ("b", 2.0, 3), ("c", 1.0, 1)]);
        assert!(matches!(chow_sum(&extra, &m, 3), Err(GpError::AtomMismatch { index: 2, .. })));
        let r = chow_sum(&extra, &m, 2).unwrap();
        assert_eq!(r.verdict, SeriesVerdict::Inconclusive);

        let swapped = atoms(&[("b", 2.0, 3), ("a", 1.0, 1)]);
        assert!(matches!(chow_sum(&m, &swapped, 2), Err(GpError::AtomMismatch { index: 0, .. })));
    }

    #[test]
    fn chow_weights_by_dimension() {
        let m1 = atoms(&[("x", 2.0, 1), ("y", 3.0, 5)]);
        let m2 = atoms(&[("x", 1.0, 1), ("y", 1.0, 5)]);
        let r = chow_sum(&m1, &m2, 2).unwrap();
        assert_eq!(r.terms, vec![1.0, 20.0]);
        assert_eq!(r.partial_sums, vec![1.0, 21.0]);
        assert_eq!(r.indices, vec![1, 2]);
    }

    #[test]
    fn shared_atoms() {
        let m = atoms(&[("a", 1.0, 1), ("b", 2.0, 3)]);
        assert!(check_shared_atoms(&m, &m));
        let perm = atoms(&[("b", 5.0, 3), ("a", 1.0, 1)]);
        assert!(check_shared_atoms(&m, &perm));
        let extra = atoms(&[("a", 1.0, 1), ("b", 2.0, 3), ("c", 1.0, 1)]);
        assert!(!check_shared_atoms(&extra, &m));
    }

    #[test]
    fn measure_validation_and_json() {
        let bad = AtomicSpectralMeasure::new(vec![Atom {
            label: "a".into(),
            mass: 0.0,
            dim: 1,
        }]);
        assert!(bad.is_err());
        let m: AtomicSpectralMeasure =
            serde_json::from_str(r#"{"atoms": [{"label": "k0", "mass": 1.0, "dim": 1}]}"#).unwrap();
        assert_eq!(m.len(), 1);
        assert!(serde_json::from_str::<AtomicSpectralMeasure>(
            r#"{"atoms": [{"label": "k0", "mass": 1.0, "dim": 1}, {"label": "k0", "mass": 2.0, "dim": 1}]}"#
        )
        .is_err());
    }
}
