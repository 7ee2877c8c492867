use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::phonology::Vowel;

/// A point in the lip-parameter plane, `[A, B]`.
pub type Point = [f64; 2];

/// Eigenvalue ratio below which a fitted covariance gets a ridge.
pub const RIDGE_TRIGGER: f64 = 1e-9;
/// Ridge size relative to the mean diagonal entry.
pub const RIDGE_SCALE: f64 = 1e-6;

/// Bivariate normal model of one vowel's lip cloud.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gaussian2D {
    pub mu: Point,
    pub sigma: [[f64; 2]; 2],
}

impl Gaussian2D {
    pub fn new(mu: Point, sigma: [[f64; 2]; 2]) -> Self {
        Gaussian2D { mu, sigma }
    }

    pub fn standard() -> Self {
        Gaussian2D::new([0.0, 0.0], [[1.0, 0.0], [0.0, 1.0]])
    }

    /// Sample mean and unbiased covariance, with a ridge added when the
    /// covariance is (near) singular.
    pub fn fit(points: &[Point]) -> Result<Self> {
        let n = points.len();
        if n < 2 {
            return Err(Error::InsufficientData {
                vowel: None,
                found: n,
                needed: 2,
            });
        }
        let nf = n as f64;
        let mut mu = [0.0; 2];
        for p in points {
            mu[0] += p[0];
            mu[1] += p[1];
        }
        mu[0] /= nf;
        mu[1] /= nf;

        let (mut saa, mut sab, mut sbb) = (0.0, 0.0, 0.0);
        for p in points {
            let (da, db) = (p[0] - mu[0], p[1] - mu[1]);
            saa += da * da;
            sab += da * db;
            sbb += db * db;
        }
        let d = nf - 1.0;
        let mut sigma = [[saa / d, sab / d], [sab / d, sbb / d]];

        let (lo, hi) = eigenvalues(sigma);
        let well_conditioned = lo >= RIDGE_TRIGGER * hi && hi > 0.0;
        if !well_conditioned {
            let trace = sigma[0][0] + sigma[1][1];
            // a cloud of identical points has no scale to borrow from
            let ridge = if trace > 0.0 {
                RIDGE_SCALE * trace / 2.0
            } else {
                RIDGE_SCALE
            };
            sigma[0][0] += ridge;
            sigma[1][1] += ridge;
        }
        Ok(Gaussian2D { mu, sigma })
    }

    pub fn determinant(&self) -> f64 {
        self.sigma[0][0] * self.sigma[1][1] - self.sigma[0][1] * self.sigma[1][0]
    }

    pub fn is_positive_definite(&self) -> bool {
        let s = self.sigma;
        s[0][1] == s[1][0] && s[0][0] > 0.0 && self.determinant() > 0.0 && s.iter().flatten().all(|v| v.is_finite())
    }

    pub fn eigenvalues(&self) -> (f64, f64) {
        eigenvalues(self.sigma)
    }

    pub fn ln_pdf(&self, x: Point) -> Result<f64> {
        Ok(Precomputed::new(self)?.ln_pdf(x))
    }

    pub fn pdf(&self, x: Point) -> Result<f64> {
        self.ln_pdf(x).map(f64::exp)
    }
}

/// Smaller and larger eigenvalue of a symmetric 2x2 matrix.
fn eigenvalues(s: [[f64; 2]; 2]) -> (f64, f64) {
    let half_trace = (s[0][0] + s[1][1]) / 2.0;
    let r = (((s[0][0] - s[1][1]) / 2.0).powi(2) + s[0][1] * s[1][0])
        .max(0.0)
        .sqrt();
    (half_trace - r, half_trace + r)
}

/// Inverse covariance and log normalizer, computed once per model.
#[derive(Debug, Clone, Copy)]
struct Precomputed {
    mu: Point,
    inv: [f64; 3],
    ln_norm: f64,
}

impl Precomputed {
    fn new(g: &Gaussian2D) -> Result<Self> {
        if !g.is_positive_definite() {
            return Err(Error::NumericDomain(format!(
                "covariance {:?} is not positive definite",
                g.sigma
            )));
        }
        let det = g.determinant();
        let s = g.sigma;
        Ok(Precomputed {
            mu: g.mu,
            inv: [s[1][1] / det, -s[0][1] / det, s[0][0] / det],
            ln_norm: -(2.0 * PI).ln() - 0.5 * det.ln(),
        })
    }

    fn ln_pdf(&self, x: Point) -> f64 {
        let (da, db) = (x[0] - self.mu[0], x[1] - self.mu[1]);
        let q = self.inv[0] * da * da + 2.0 * self.inv[1] * da * db + self.inv[2] * db * db;
        self.ln_norm - 0.5 * q
    }
}

/// A set of per-vowel models ready for classification.
#[derive(Debug, Clone)]
pub struct Classifier {
    models: Vec<(Vowel, Precomputed)>,
}

impl Classifier {
    /// Models are ordered by vowel; duplicates keep the last one given.
    pub fn new(models: impl IntoIterator<Item = (Vowel, Gaussian2D)>) -> Result<Self> {
        let mut by_vowel = std::collections::BTreeMap::new();
        for (v, g) in models {
            by_vowel.insert(v, g);
        }
        if by_vowel.is_empty() {
            return Err(Error::InsufficientData {
                vowel: None,
                found: 0,
                needed: 1,
            });
        }
        let models = by_vowel
            .into_iter()
            .map(|(v, g)| Precomputed::new(&g).map(|p| (v, p)))
            .collect::<Result<_>>()?;
        Ok(Classifier { models })
    }

    pub fn labels(&self) -> impl Iterator<Item = Vowel> + '_ {
        self.models.iter().map(|(v, _)| *v)
    }

    /// The vowel whose model gives `x` the highest density. On an exact tie
    /// the vowel that comes first in canonical order wins.
    pub fn classify(&self, x: Point) -> Vowel {
        let mut best = self.models[0].0;
        let mut best_score = f64::NEG_INFINITY;
        for (v, m) in &self.models {
            let s = m.ln_pdf(x);
            if s > best_score {
                best = *v;
                best_score = s;
            }
        }
        best
    }
}

/// One-shot classification against a list of models.
pub fn classify(models: &[(Vowel, Gaussian2D)], x: Point) -> Result<Vowel> {
    Ok(Classifier::new(models.iter().copied())?.classify(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn density_at_mean_and_one_sigma() {
        let g = Gaussian2D::standard();
        assert!(close(g.pdf([0.0, 0.0]).unwrap(), 0.159_154_943_091_895_33, 1e-15));
        let expected = (-0.5f64).exp() / (2.0 * PI);
        assert!(close(g.pdf([1.0, 0.0]).unwrap(), expected, 1e-15));
        assert!(close(expected, 0.096532, 1e-6));
    }

    #[test]
    fn density_integrates_to_one() {
        let g = Gaussian2D::new([3.0, -1.0], [[2.0, 0.6], [0.6, 0.5]]);
        // midpoint rule over +-10 standard deviations
        let (n, half) = (800, 10.0);
        let (sa, sb) = (g.sigma[0][0].sqrt(), g.sigma[1][1].sqrt());
        let (ha, hb) = (2.0 * half * sa / n as f64, 2.0 * half * sb / n as f64);
        let mut total = 0.0;
        for i in 0..n {
            for j in 0..n {
                let a = g.mu[0] - half * sa + (i as f64 + 0.5) * ha;
                let b = g.mu[1] - half * sb + (j as f64 + 0.5) * hb;
                total += g.pdf([a, b]).unwrap() * ha * hb;
            }
        }
        assert!(close(total, 1.0, 1e-3), "{total}");
    }

    #[test]
    fn fit_square_corners() {
        let g = Gaussian2D::fit(&[[0.0, 0.0], [2.0, 0.0], [0.0, 2.0], [2.0, 2.0]]).unwrap();
        assert_eq!(g.mu, [1.0, 1.0]);
        for (got, want) in g.sigma.iter().flatten().zip([4.0 / 3.0, 0.0, 0.0, 4.0 / 3.0]) {
            assert!(close(*got, want, 1e-15));
        }
    }

    #[test]
    fn degenerate_cloud_is_regularized() {
        let g = Gaussian2D::fit(&[[1.0, 1.0]; 3]).unwrap();
        assert_eq!(g.mu, [1.0, 1.0]);
        assert_eq!(g.sigma, [[RIDGE_SCALE, 0.0], [0.0, RIDGE_SCALE]]);
        assert!(g.pdf([1.0, 1.0]).unwrap().is_finite());

        // collinear points: singular but with nonzero trace
        let g = Gaussian2D::fit(&[[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]]).unwrap();
        let (lo, hi) = g.eigenvalues();
        assert!(lo > 0.0 && lo >= RIDGE_TRIGGER * hi);
        assert!(close(g.sigma[0][0], 1.0 + RIDGE_SCALE, 1e-12));
    }

    #[test]
    fn too_few_points() {
        assert!(matches!(
            Gaussian2D::fit(&[[1.0, 2.0]]),
            Err(Error::InsufficientData {
                found: 1,
                needed: 2,
                ..
            })
        ));
    }

    #[test]
    fn indefinite_covariance_is_rejected() {
        let g = Gaussian2D::new([0.0, 0.0], [[1.0, 2.0], [2.0, 1.0]]);
        assert!(matches!(g.pdf([0.0, 0.0]), Err(Error::NumericDomain(_))));
        let g = Gaussian2D::new([0.0, 0.0], [[0.0, 0.0], [0.0, 1.0]]);
        assert!(g.pdf([0.0, 0.0]).is_err());
    }

    #[test]
    fn classify_nearest_and_single() {
        let far = Gaussian2D::new([10.0, 10.0], [[1.0, 0.0], [0.0, 1.0]]);
        let models = [(Vowel::A, Gaussian2D::standard()), (Vowel::O, far)];
        assert_eq!(classify(&models, [1.0, 1.0]).unwrap(), Vowel::A);
        assert_eq!(classify(&models[1..], [0.0, 0.0]).unwrap(), Vowel::O);
        assert!(classify(&[], [0.0, 0.0]).is_err());
    }

    #[test]
    fn ties_go_to_canonical_order() {
        let g = Gaussian2D::standard();
        let models = [(Vowel::Ou, g), (Vowel::E, g), (Vowel::An, g)];
        assert_eq!(classify(&models, [0.3, 0.1]).unwrap(), Vowel::E);
    }

    fn arb_point() -> impl Strategy<Value = Point> {
        [-50.0..50.0f64, -50.0..50.0f64]
    }

    fn arb_model() -> impl Strategy<Value = Gaussian2D> {
        (arb_point(), 0.1..20.0f64, 0.1..20.0f64, -0.95..0.95f64).prop_map(|(mu, sa, sb, r)| {
            let c = r * (sa * sb).sqrt();
            Gaussian2D::new(mu, [[sa, c], [c, sb]])
        })
    }

    proptest! {
        #[test]
        fn maximum_is_at_the_mean(g in arb_model(), x in arb_point()) {
            prop_assert!(g.pdf(g.mu).unwrap() >= g.pdf(x).unwrap());
        }

        #[test]
        fn fitted_models_are_positive_definite(pts in prop::collection::vec(arb_point(), 2..30)) {
            let g = Gaussian2D::fit(&pts).unwrap();
            prop_assert!(g.is_positive_definite());
            prop_assert!(g.sigma[0][1] == g.sigma[1][0]);
        }

        #[test]
        fn translation_leaves_labels_unchanged(
            a in prop::collection::vec(arb_point(), 3..12),
            b in prop::collection::vec(arb_point(), 3..12),
            tests in prop::collection::vec(arb_point(), 1..20),
            shift in arb_point(),
        ) {
            let fit = |pts: &[Point], d: Point| {
                let moved: Vec<Point> = pts.iter().map(|p| [p[0] + d[0], p[1] + d[1]]).collect();
                Classifier::new([
                    (Vowel::A, Gaussian2D::fit(&moved).unwrap()),
                    (Vowel::O, Gaussian2D::fit(&b.iter().map(|p| [p[0] + d[0], p[1] + d[1]]).collect::<Vec<_>>()).unwrap()),
                ])
                .unwrap()
            };
            let here = fit(&a, [0.0, 0.0]);
            let there = fit(&a, shift);
            let ga = Gaussian2D::fit(&a).unwrap();
            let gb = Gaussian2D::fit(&b).unwrap();
            for x in tests {
                // skip points sitting on the decision boundary
                let margin = (ga.ln_pdf(x).unwrap() - gb.ln_pdf(x).unwrap()).abs();
                if margin < 1e-6 {
                    continue;
                }
                prop_assert_eq!(here.classify(x), there.classify([x[0] + shift[0], x[1] + shift[1]]));
            }
        }
    }
}
