use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::gaussian::{Classifier, Gaussian2D, Point};
use super::VowelClouds;
use crate::error::{Error, Result};
use crate::inventory::{Position, VowelAllocation};
use crate::phonology::Vowel;

/// Fewest frames a vowel needs before it can be split and scored.
pub const MIN_SAMPLES: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalConfig {
    pub train_fraction: f64,
    pub repetitions: usize,
    pub seed: u64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            train_fraction: 0.8,
            repetitions: 100,
            seed: 0,
        }
    }
}

impl EvalConfig {
    pub fn with_seed(seed: u64) -> Self {
        EvalConfig {
            seed,
            ..Self::default()
        }
    }

    pub fn with_repetitions(self, repetitions: usize) -> Self {
        EvalConfig { repetitions, ..self }
    }
}

/// Accuracy over repetitions, in percent.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PositionScore {
    pub mean: f64,
    pub std: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalReport {
    pub per_position: [PositionScore; 5],
    pub average: f64,
}

impl EvalReport {
    pub fn new(per_position: [PositionScore; 5]) -> Self {
        let average = per_position.iter().map(|s| s.mean).sum::<f64>() / 5.0;
        EvalReport { per_position, average }
    }

    /// Report from bare per-position means, e.g. a published score row.
    pub fn from_means(means: [f64; 5]) -> Self {
        Self::new(means.map(|mean| PositionScore { mean, std: 0.0 }))
    }

    pub fn position(&self, p: Position) -> PositionScore {
        self.per_position[p.index()]
    }
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in Position::ALL {
            let s = self.position(p);
            writeln!(f, "{p}\t{:.2}\t{:.2}", s.mean, s.std)?;
        }
        writeln!(f, "average\t{:.2}", self.average)
    }
}

/// Repeated stratified train/test evaluation of a group of vowels classified
/// among themselves. `stream` separates the random sequences of different
/// groups sharing one seed.
pub fn evaluate_vowels(clouds: &VowelClouds, vowels: &[Vowel], cfg: &EvalConfig, stream: u32) -> Result<PositionScore> {
    if cfg.repetitions == 0 || !(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0) {
        return Err(Error::NumericDomain(format!(
            "need at least one repetition and a train fraction in (0, 1), got {} and {}",
            cfg.repetitions, cfg.train_fraction
        )));
    }
    let mut vowels = vowels.to_vec();
    vowels.sort();
    vowels.dedup();
    for &v in &vowels {
        let n = clouds.get(v).len();
        if n < MIN_SAMPLES {
            return Err(Error::InsufficientData {
                vowel: Some(v),
                found: n,
                needed: MIN_SAMPLES,
            });
        }
    }
    if vowels.len() < 2 {
        // nothing to confuse a lone vowel with
        return Ok(PositionScore { mean: 100.0, std: 0.0 });
    }

    let accuracies = (0..cfg.repetitions)
        .into_par_iter()
        .map(|rep| one_repetition(clouds, &vowels, cfg, stream, rep as u64))
        .collect::<Result<Vec<f64>>>()?;
    let n = accuracies.len() as f64;
    let mean = accuracies.iter().sum::<f64>() / n;
    let std = if accuracies.len() > 1 {
        (accuracies.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    Ok(PositionScore { mean, std })
}

fn one_repetition(clouds: &VowelClouds, vowels: &[Vowel], cfg: &EvalConfig, stream: u32, rep: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream((u64::from(stream) << 32) | rep);

    let mut models = Vec::with_capacity(vowels.len());
    let mut tests: Vec<(Vowel, Point)> = Vec::new();
    for &v in vowels {
        let points = clouds.get(v);
        let n = points.len();
        let n_train = ((cfg.train_fraction * n as f64).round() as usize).clamp(2, n - 1);
        let mut idx: Vec<usize> = (0..n).collect();
        idx.shuffle(&mut rng);
        let train: Vec<Point> = idx[..n_train].iter().map(|&i| points[i]).collect();
        models.push((v, Gaussian2D::fit(&train)?));
        tests.extend(idx[n_train..].iter().map(|&i| (v, points[i])));
    }
    let classifier = Classifier::new(models)?;
    let correct = tests.iter().filter(|(v, x)| classifier.classify(*x) == *v).count();
    Ok(100.0 * correct as f64 / tests.len() as f64)
}

pub fn evaluate_position(
    clouds: &VowelClouds,
    pos: Position,
    alloc: &VowelAllocation,
    cfg: &EvalConfig,
) -> Result<PositionScore> {
    evaluate_vowels(clouds, &alloc.members(pos), cfg, pos.index() as u32)
}

pub fn evaluate_allocation(clouds: &VowelClouds, alloc: &VowelAllocation, cfg: &EvalConfig) -> Result<EvalReport> {
    let mut scores = [PositionScore::default(); 5];
    for p in Position::ALL {
        scores[p.index()] = evaluate_position(clouds, p, alloc, cfg)?;
    }
    Ok(EvalReport::new(scores))
}
