//! Lip-parameter samples, the Gaussian vowel classifier and its
//! per-position evaluation.
//!
//! Samples are read from CSV with the header `speaker,word,vowel,frame,A,B`,
//! one row per annotated video frame.

mod eval;
mod gaussian;

use std::collections::BTreeMap;
use std::io;

pub use eval::{
    evaluate_allocation, evaluate_position, evaluate_vowels, EvalConfig, EvalReport, PositionScore, MIN_SAMPLES,
};
pub use gaussian::{classify, Classifier, Gaussian2D, Point, RIDGE_SCALE, RIDGE_TRIGGER};

use crate::error::{Error, Result};
use crate::phonology::Vowel;

pub const CSV_HEADER: [&str; 6] = ["speaker", "word", "vowel", "frame", "A", "B"];

/// One annotated frame: inner-lip width `a` and height `b`.
#[derive(Debug, Clone, PartialEq)]
pub struct LipSample {
    pub speaker: String,
    pub word: String,
    pub vowel: Vowel,
    pub frame: u32,
    pub a: f64,
    pub b: f64,
}

impl LipSample {
    pub fn point(&self) -> Point {
        [self.a, self.b]
    }
}

/// Reads lip samples. Errors name the 1-based line of the offending row.
pub fn read_lip_csv<R: io::Read>(reader: R) -> Result<Vec<LipSample>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header = rdr.headers().map_err(|e| Error::format(1, e.to_string()))?;
    if !header.iter().eq(CSV_HEADER) {
        return Err(Error::format(
            1,
            format!(
                "expected header `{}`, found `{}`",
                CSV_HEADER.join(","),
                header.iter().collect::<Vec<_>>().join(",")
            ),
        ));
    }
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            Error::format(line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        out.push(parse_row(&rec).map_err(|m| Error::format(line, m))?);
    }
    Ok(out)
}

fn parse_row(rec: &csv::StringRecord) -> Result<LipSample, String> {
    let field = |i: usize| rec.get(i).unwrap_or("");
    let number = |i: usize| {
        field(i)
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| format!("column {}: `{}` is not a number", CSV_HEADER[i], field(i)))
    };
    let vowel = Vowel::parse_lenient(field(2)).ok_or_else(|| format!("unknown vowel `{}`", field(2)))?;
    let frame = field(3)
        .parse()
        .map_err(|_| format!("column frame: `{}` is not a frame index", field(3)))?;
    let (a, b) = (number(4)?, number(5)?);
    if a <= 0.0 {
        return Err(format!("lip width A must be positive, found {a}"));
    }
    if b < 0.0 {
        return Err(format!("lip height B must not be negative, found {b}"));
    }
    Ok(LipSample {
        speaker: field(0).to_string(),
        word: field(1).to_string(),
        vowel,
        frame,
        a,
        b,
    })
}

pub fn write_lip_csv<W: io::Write>(writer: W, samples: &[LipSample]) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(CSV_HEADER)?;
    for s in samples {
        w.write_record([
            s.speaker.as_str(),
            s.word.as_str(),
            s.vowel.as_str(),
            &s.frame.to_string(),
            &format!("{:.4}", s.a),
            &format!("{:.4}", s.b),
        ])?;
    }
    w.flush()
}

/// Splits samples by speaker, keeping file order within each speaker.
pub fn by_speaker(samples: &[LipSample]) -> BTreeMap<String, Vec<LipSample>> {
    let mut out: BTreeMap<String, Vec<LipSample>> = BTreeMap::new();
    for s in samples {
        out.entry(s.speaker.clone()).or_default().push(s.clone());
    }
    out
}

/// Per-vowel point clouds of one speaker.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct VowelClouds(BTreeMap<Vowel, Vec<Point>>);

impl VowelClouds {
    pub fn from_samples<'a>(samples: impl IntoIterator<Item = &'a LipSample>) -> Self {
        let mut map: BTreeMap<Vowel, Vec<Point>> = BTreeMap::new();
        for s in samples {
            map.entry(s.vowel).or_default().push(s.point());
        }
        VowelClouds(map)
    }

    pub fn insert(&mut self, v: Vowel, points: Vec<Point>) {
        self.0.insert(v, points);
    }

    pub fn get(&self, v: Vowel) -> &[Point] {
        self.0.get(&v).map_or(&[], Vec::as_slice)
    }

    pub fn vowels(&self) -> impl Iterator<Item = Vowel> + '_ {
        self.0.keys().copied()
    }
}
