//! Finite-size fits over collections of run summaries.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::bethe_reference;
use crate::format::G17;

/// Attached to every extrapolation report.
pub const EXTRAPOLATION_CAVEAT: &str =
    "the extrapolated energy per site is a fitted estimate, not a variational upper bound";

#[derive(Debug, Error, PartialEq)]
pub enum AnalysisError {
    #[error("a fit needs at least {need} points, got {got}")]
    TooFewPoints { need: usize, got: usize },
    #[error("all x values are equal ({0}); the slope is undefined")]
    DegenerateX(f64),
    #[error("non-finite value in the input at point {0}")]
    NonFinite(usize),
    #[error("inputs mix lattice kinds {0} and {1}")]
    MixedKinds(String, String),
    #[error("run with n = {0} uses the sampled estimator")]
    SampledInput(usize),
    #[error("run with n = {0} has no exact baseline")]
    MissingBaseline(usize),
    #[error("run summary: {0}")]
    Summary(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    pub slope: G17,
    pub intercept: G17,
    pub residual: G17,
    pub points: usize,
    pub x_column: String,
    pub y_column: String,
}

impl FitResult {
    pub fn at(&self, x: f64) -> f64 {
        self.intercept.0 + self.slope.0 * x
    }
}

/// Ordinary least squares on `(x, y)` pairs using centered sums.
pub fn linear_fit(points: &[(f64, f64)], x_column: &str, y_column: &str) -> Result<FitResult, AnalysisError> {
    if points.len() < 2 {
        return Err(AnalysisError::TooFewPoints {
            need: 2,
            got: points.len(),
        });
    }
    if let Some(i) = points.iter().position(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(AnalysisError::NonFinite(i));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(AnalysisError::DegenerateX(points[0].0));
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = points
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum::<f64>();
    Ok(FitResult {
        slope: G17(slope),
        intercept: G17(intercept),
        residual: G17(residual),
        points: points.len(),
        x_column: x_column.into(),
        y_column: y_column.into(),
    })
}

/// The fields of a run summary the fits use.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct RunPoint {
    pub kind: String,
    pub n: usize,
    pub estimator: String,
    pub energy: f64,
    #[serde(default)]
    pub baseline: Option<BaselinePoint>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct BaselinePoint {
    pub e0: f64,
}

impl RunPoint {
    pub fn exact(kind: &str, n: usize, energy: f64, e0: Option<f64>) -> Self {
        RunPoint {
            kind: kind.into(),
            n,
            estimator: "exact".into(),
            energy,
            baseline: e0.map(|e0| BaselinePoint { e0 }),
        }
    }

    pub fn from_summary_json(text: &str) -> Result<Self, AnalysisError> {
        serde_json::from_str(text).map_err(|e| AnalysisError::Summary(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    All,
    Even,
    Odd,
}

impl Parity {
    pub fn keeps(self, n: usize) -> bool {
        match self {
            Parity::All => true,
            Parity::Even => n.is_multiple_of(2),
            Parity::Odd => n % 2 == 1,
        }
    }
}

impl std::str::FromStr for Parity {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "all" => Ok(Parity::All),
            "even" => Ok(Parity::Even),
            "odd" => Ok(Parity::Odd),
            other => Err(format!("unknown parity '{other}' (expected all, even or odd)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Extrapolation {
    pub fit: FitResult,
    pub parity: Parity,
    pub sizes: Vec<usize>,
    pub energy_per_site: G17,
    pub reference: G17,
    pub difference: G17,
    pub caveat: &'static str,
}

fn check_kinds(runs: &[RunPoint]) -> Result<(), AnalysisError> {
    if let Some(first) = runs.first() {
        if let Some(other) = runs.iter().find(|r| r.kind != first.kind) {
            return Err(AnalysisError::MixedKinds(first.kind.clone(), other.kind.clone()));
        }
    }
    Ok(())
}

/// Slope of total energy against N, compared with the Bethe-ansatz value.
pub fn thermodynamic_extrapolation(runs: &[RunPoint], parity: Parity) -> Result<Extrapolation, AnalysisError> {
    check_kinds(runs)?;
    let kept: Vec<&RunPoint> = runs.iter().filter(|r| parity.keeps(r.n)).collect();
    if kept.len() < 3 {
        return Err(AnalysisError::TooFewPoints {
            need: 3,
            got: kept.len(),
        });
    }
    if let Some(r) = kept.iter().find(|r| r.estimator != "exact") {
        return Err(AnalysisError::SampledInput(r.n));
    }
    let points: Vec<(f64, f64)> = kept.iter().map(|r| (r.n as f64, r.energy)).collect();
    let fit = linear_fit(&points, "n", "energy")?;
    let estimate = fit.slope.0;
    let reference = bethe_reference();
    Ok(Extrapolation {
        parity,
        sizes: kept.iter().map(|r| r.n).collect(),
        energy_per_site: G17(estimate),
        reference: G17(reference),
        difference: G17(estimate - reference),
        caveat: EXTRAPOLATION_CAVEAT,
        fit,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Abscissa {
    /// x = N
    N,
    /// x = ln N
    LogN,
    /// x = 1 / N
    InvN,
}

impl Abscissa {
    pub fn transform(self, n: f64) -> f64 {
        match self {
            Abscissa::N => n,
            Abscissa::LogN => n.ln(),
            Abscissa::InvN => 1.0 / n,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Abscissa::N => "n",
            Abscissa::LogN => "logn",
            Abscissa::InvN => "invn",
        }
    }
}

impl std::str::FromStr for Abscissa {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "n" => Ok(Abscissa::N),
            "logn" => Ok(Abscissa::LogN),
            "invn" => Ok(Abscissa::InvN),
            other => Err(format!("unknown abscissa '{other}' (expected n, logn or invn)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorScaling {
    pub fit: FitResult,
    pub abscissa: Abscissa,
    pub parity: Parity,
    pub sizes: Vec<usize>,
}

impl ErrorScaling {
    /// Per-site error predicted by the fitted line at size `n`.
    pub fn prediction(&self, n: usize) -> f64 {
        self.fit.at(self.abscissa.transform(n as f64))
    }
}

/// Fits per-site error `|E_f - E_0| / N` against a transform of N.
pub fn error_scaling_fit(runs: &[RunPoint], abscissa: Abscissa, parity: Parity) -> Result<ErrorScaling, AnalysisError> {
    check_kinds(runs)?;
    let mut points = Vec::new();
    let mut sizes = Vec::new();
    for r in runs.iter().filter(|r| parity.keeps(r.n)) {
        let b = r.baseline.as_ref().ok_or(AnalysisError::MissingBaseline(r.n))?;
        let n = r.n as f64;
        points.push((abscissa.transform(n), (r.energy - b.e0).abs() / n));
        sizes.push(r.n);
    }
    let fit = linear_fit(&points, abscissa.name(), "error_per_site")?;
    Ok(ErrorScaling {
        fit,
        abscissa,
        parity,
        sizes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn exact_line() {
        let f = linear_fit(&[(1.0, 2.0), (2.0, 4.0), (3.0, 6.0)], "x", "y").unwrap();
        assert!((f.slope.0 - 2.0).abs() < 1e-14);
        assert!(f.intercept.0.abs() < 1e-14);
        assert!(f.residual.0 <= 1e-20 * 56.0);
        assert_eq!(f.points, 3);
    }

    #[test]
    fn degenerate_inputs() {
        assert_eq!(
            linear_fit(&[(2.0, 1.0), (2.0, 3.0)], "x", "y"),
            Err(AnalysisError::DegenerateX(2.0))
        );
        assert!(matches!(linear_fit(&[(1.0, 1.0)], "x", "y"), Err(AnalysisError::TooFewPoints { .. })));
        assert!(matches!(
            linear_fit(&[(1.0, 1.0), (2.0, f64::NAN)], "x", "y"),
            Err(AnalysisError::NonFinite(1))
        ));
    }

    #[test]
    fn proportional_energies_give_their_constant() {
        let runs: Vec<RunPoint> = (4..9).map(|n| RunPoint::exact("ring", n, -1.5 * n as f64, None)).collect();
        let e = thermodynamic_extrapolation(&runs, Parity::All).unwrap();
        assert!((e.energy_per_site.0 + 1.5).abs() < 1e-12);
        assert!((e.difference.0 - (-1.5 - bethe_reference())).abs() < 1e-12);
        assert_eq!(e.caveat, EXTRAPOLATION_CAVEAT);
        let odd = thermodynamic_extrapolation(&runs, Parity::Odd);
        assert!(matches!(odd, Err(AnalysisError::TooFewPoints { need: 3, got: 2 })));
    }

    #[test]
    fn extrapolation_rejects_bad_inputs() {
        let mut runs: Vec<RunPoint> = (4..8).map(|n| RunPoint::exact("ring", n, -(n as f64), None)).collect();
        runs[2].kind = "chain".into();
        assert!(matches!(thermodynamic_extrapolation(&runs, Parity::All), Err(AnalysisError::MixedKinds(..))));
        runs[2].kind = "ring".into();
        runs[1].estimator = "sampled".into();
        assert_eq!(thermodynamic_extrapolation(&runs, Parity::All), Err(AnalysisError::SampledInput(5)));
    }

    #[test]
    fn zero_error_fit() {
        let runs: Vec<RunPoint> = (4..9).map(|n| RunPoint::exact("ring", n, -2.0 * n as f64, Some(-2.0 * n as f64))).collect();
        for a in [Abscissa::N, Abscissa::LogN, Abscissa::InvN] {
            let s = error_scaling_fit(&runs, a, Parity::All).unwrap();
            assert_eq!((s.fit.slope.0, s.fit.intercept.0), (0.0, 0.0));
            assert_eq!(s.prediction(100), 0.0);
        }
        let mut missing = runs.clone();
        missing[3].baseline = None;
        assert_eq!(
            error_scaling_fit(&missing, Abscissa::N, Parity::All),
            Err(AnalysisError::MissingBaseline(7))
        );
    }

    #[test]
    fn parity_split_separates_clusters() {
        let runs: Vec<RunPoint> = (6..14)
            .map(|n| {
                let err = if n % 2 == 0 { 0.01 } else { 0.05 } * n as f64;
                RunPoint::exact("ring", n, -1.7 * n as f64 + err, Some(-1.7 * n as f64))
            })
            .collect();
        let even = error_scaling_fit(&runs, Abscissa::N, Parity::Even).unwrap();
        let odd = error_scaling_fit(&runs, Abscissa::N, Parity::Odd).unwrap();
        assert!((even.prediction(20) - 0.01).abs() < 1e-12);
        assert!((odd.prediction(21) - 0.05).abs() < 1e-12);
        assert_eq!(even.sizes, vec![6, 8, 10, 12]);
    }

    #[test]
    fn reads_run_summaries() {
        let text = r#"{"kind":"ring","n":6,"estimator":"exact","energy":-11.2,"layers":null,
                       "baseline":{"e0":-11.21,"overlap":0.99}}"#;
        let r = RunPoint::from_summary_json(text).unwrap();
        assert_eq!((r.n, r.energy, r.baseline.unwrap().e0), (6, -11.2, -11.21));
        assert!(RunPoint::from_summary_json("{}").is_err());
    }

    #[test]
    fn exact_ring_energies_approach_the_bethe_value() {
        use crate::exact::{ground_state_lanczos, LanczosOptions};
        use crate::lattice::{build_hamiltonian, build_lattice, Boundary, CouplingModel, LatticeKind};
        let runs: Vec<RunPoint> = (4..=12)
            .step_by(2)
            .map(|n| {
                let l = build_lattice(LatticeKind::Ring, &[n], Boundary::Periodic).unwrap();
                let h = build_hamiltonian(&l, &CouplingModel::isotropic()).unwrap();
                let e = ground_state_lanczos(&h, &LanczosOptions::default()).unwrap().energy;
                RunPoint::exact("ring", n, e, None)
            })
            .collect();
        let mut last = f64::INFINITY;
        for end in 3..=runs.len() {
            let e = thermodynamic_extrapolation(&runs[..end], Parity::All).unwrap();
            let d = e.difference.0.abs();
            assert!(d < last, "range up to {} gives {d}", runs[end - 1].n);
            last = d;
        }
    }

    proptest! {
        #[test]
        fn least_squares_is_a_minimum(
            pts in prop::collection::vec((-50.0f64..50.0, -50.0f64..50.0), 3..12),
            ds in -1.0f64..1.0,
            di in -1.0f64..1.0,
        ) {
            let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
            prop_assume!(xs.iter().any(|&x| (x - xs[0]).abs() > 1e-3));
            let f = linear_fit(&pts, "x", "y").unwrap();
            let rss = |s: f64, i: f64| pts.iter().map(|p| (p.1 - i - s * p.0).powi(2)).sum::<f64>();
            let base = rss(f.slope.0, f.intercept.0);
            prop_assert!(f.residual.0 >= 0.0);
            for (s, i) in [(1e-3 * ds.signum(), 0.0), (0.0, 1e-3 * di.signum()), (1e-3, -1e-3), (-1e-3, 1e-3)] {
                prop_assert!(rss(f.slope.0 + s, f.intercept.0 + i) >= base * (1.0 - 1e-12));
            }
        }

        #[test]
        fn fit_ignores_order(pts in prop::collection::vec((-50.0f64..50.0, -50.0f64..50.0), 3..12), seed in any::<u64>()) {
            prop_assume!(pts.iter().any(|p| (p.0 - pts[0].0).abs() > 1e-3));
            let mut shuffled = pts.clone();
            let len = shuffled.len();
            shuffled.rotate_left((seed as usize) % len);
            shuffled.reverse();
            let a = linear_fit(&pts, "x", "y").unwrap();
            let b = linear_fit(&shuffled, "x", "y").unwrap();
            prop_assert!((a.slope.0 - b.slope.0).abs() <= 1e-9 * (1.0 + a.slope.0.abs()));
            prop_assert!((a.intercept.0 - b.intercept.0).abs() <= 1e-9 * (1.0 + a.intercept.0.abs()));
        }
    }
}
