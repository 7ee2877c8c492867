//! Synthetic lip-parameter data.
//!
//! A config gives, per vowel, one or more bivariate normal components:
//!
//! ```text
//! # vowel,context,meanA,meanB,sdA,sdB,corr[,weight]
//! i,*,22,10,1,1,0
//! i,retroflex,30,14,1.5,1,0.2
//! ```
//!
//! `context` is `*`, or one of the apical variants `none`, `dental`,
//! `retroflex`. A word uses the components listed for its own variant when
//! there are any, otherwise those under `*`. Several lines with the same key
//! form a mixture; each word draws one component (by weight) and all of its
//! frames come from it.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::lip::{LipSample, Point};
use crate::phonology::{ApicalVariant, Vowel};
use crate::pinyin::Syllabary;
use crate::transcode::decompose_final;

const SEPARATED: &str = include_str!("../data/synthetic/separated.txt");
const CONFUSION: &str = include_str!("../data/synthetic/confusion.txt");

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Component {
    pub mean: Point,
    pub sd: [f64; 2],
    pub corr: f64,
    pub weight: f64,
}

impl Component {
    fn sample(&self, rng: &mut impl Rng) -> Point {
        let z1: f64 = rng.sample(StandardNormal);
        let z2: f64 = rng.sample(StandardNormal);
        let a = self.mean[0] + self.sd[0] * z1;
        let b = self.mean[1] + self.sd[1] * (self.corr * z1 + (1.0 - self.corr * self.corr).sqrt() * z2);
        // keep samples inside the lip-parameter domain
        [a.max(1e-3), b.max(0.0)]
    }
}

/// `None` stands for the `*` wildcard.
type Context = Option<ApicalVariant>;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SynthConfig {
    components: BTreeMap<(Vowel, u8), (Context, Vec<Component>)>,
}

fn context_key(c: Context) -> u8 {
    match c {
        None => 0,
        Some(ApicalVariant::None) => 1,
        Some(ApicalVariant::Dental) => 2,
        Some(ApicalVariant::Retroflex) => 3,
    }
}

fn parse_context(s: &str) -> Option<Context> {
    match s {
        "*" => Some(None),
        "none" => Some(Some(ApicalVariant::None)),
        "dental" => Some(Some(ApicalVariant::Dental)),
        "retroflex" => Some(Some(ApicalVariant::Retroflex)),
        _ => None,
    }
}

impl SynthConfig {
    pub fn from_text(text: &str) -> Result<Self> {
        let mut cfg = SynthConfig::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if !(7..=8).contains(&fields.len()) {
                return Err(Error::format(
                    n + 1,
                    format!("expected 7 or 8 fields, found {}", fields.len()),
                ));
            }
            let vowel = Vowel::parse_lenient(fields[0])
                .ok_or_else(|| Error::format(n + 1, format!("unknown vowel `{}`", fields[0])))?;
            let context = parse_context(fields[1])
                .ok_or_else(|| Error::format(n + 1, format!("unknown context `{}`", fields[1])))?;
            let mut nums = [1.0; 6];
            for (slot, f) in nums.iter_mut().zip(&fields[2..]) {
                *slot = f
                    .parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| Error::format(n + 1, format!("`{f}` is not a number")))?;
            }
            let [ma, mb, sa, sb, corr, weight] = nums;
            if sa <= 0.0 || sb <= 0.0 || corr.abs() >= 1.0 || weight <= 0.0 {
                return Err(Error::format(
                    n + 1,
                    "standard deviations and weight must be positive and |corr| < 1",
                ));
            }
            cfg.add(
                vowel,
                context,
                Component {
                    mean: [ma, mb],
                    sd: [sa, sb],
                    corr,
                    weight,
                },
            );
        }
        Ok(cfg)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("# vowel,context,meanA,meanB,sdA,sdB,corr,weight\n");
        for ((v, _), (ctx, comps)) in &self.components {
            let ctx = ctx.map_or("*", ApicalVariant::as_str);
            for c in comps {
                let _ = writeln!(
                    out,
                    "{v},{ctx},{},{},{},{},{},{}",
                    c.mean[0], c.mean[1], c.sd[0], c.sd[1], c.corr, c.weight
                );
            }
        }
        out
    }

    pub fn add(&mut self, vowel: Vowel, context: Option<ApicalVariant>, c: Component) {
        self.components
            .entry((vowel, context_key(context)))
            .or_insert_with(|| (context, Vec::new()))
            .1
            .push(c);
    }

    /// Sixteen unit-variance clouds on a grid with 12 units between
    /// neighbours, so any grouping of vowels separates cleanly.
    pub fn separated() -> Self {
        Self::from_text(SEPARATED).expect("shipped config parses")
    }

    /// Clouds with the confusions the two allocation swaps are meant to cure:
    /// ong against retroflex i, en against a, and eng against ei.
    pub fn confusion() -> Self {
        Self::from_text(CONFUSION).expect("shipped config parses")
    }

    pub fn components(&self, vowel: Vowel, variant: ApicalVariant) -> &[Component] {
        self.components
            .get(&(vowel, context_key(Some(variant))))
            .or_else(|| self.components.get(&(vowel, context_key(None))))
            .map_or(&[], |(_, c)| c.as_slice())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthOptions {
    pub speaker: String,
    pub frames_per_word: u32,
    pub seed: u64,
}

impl Default for SynthOptions {
    fn default() -> Self {
        SynthOptions {
            speaker: "synthetic".into(),
            frames_per_word: 5,
            seed: 0,
        }
    }
}

/// Draws `frames_per_word` samples for every corpus word, in corpus order.
pub fn generate(cfg: &SynthConfig, corpus: &Corpus, opts: &SynthOptions) -> Result<Vec<LipSample>> {
    let syllables = corpus.parse(Syllabary::standard())?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut out = Vec::with_capacity(syllables.len() * opts.frames_per_word as usize);
    for s in &syllables {
        let vowel = decompose_final(s.final_).vowel;
        let comps = cfg.components(vowel, s.apical);
        if comps.is_empty() {
            return Err(Error::Incomplete(format!("no synthetic component for vowel `{vowel}`")));
        }
        let total: f64 = comps.iter().map(|c| c.weight).sum();
        let mut pick = rng.random::<f64>() * total;
        let comp = comps
            .iter()
            .find(|c| {
                pick -= c.weight;
                pick < 0.0
            })
            .unwrap_or(&comps[comps.len() - 1]);
        for frame in 0..opts.frames_per_word {
            let [a, b] = comp.sample(&mut rng);
            out.push(LipSample {
                speaker: opts.speaker.clone(),
                word: s.source.clone(),
                vowel,
                frame,
                a,
                b,
            });
        }
    }
    Ok(out)
}
