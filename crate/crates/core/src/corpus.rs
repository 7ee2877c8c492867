//! Word lists and their base-vowel statistics.

use std::fmt;

use crate::error::{Error, Result};
use crate::phonology::Vowel;
use crate::pinyin::{Syllabary, Syllable};
use crate::transcode::decompose_final;

const DEFAULT_CORPUS: &str = include_str!("../data/corpus.txt");

/// A list of single-syllable Pinyin words, toned or not.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Corpus {
    pub words: Vec<String>,
}

impl Corpus {
    /// Whitespace-separated words; `#` starts a comment running to end of line.
    pub fn from_text(text: &str) -> Self {
        let words = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or(""))
            .flat_map(str::split_whitespace)
            .map(str::to_string)
            .collect();
        Corpus { words }
    }

    /// The 242-word recording list, one word per vowel context.
    pub fn standard() -> Self {
        Self::from_text(DEFAULT_CORPUS)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn parse(&self, syllabary: &Syllabary) -> Result<Vec<Syllable>> {
        self.words
            .iter()
            .enumerate()
            .map(|(n, w)| {
                syllabary.parse_syllable(w).map_err(|e| Error::Format {
                    line: n + 1,
                    message: format!("word {}: {e}", n + 1),
                })
            })
            .collect()
    }
}

/// Occurrence counts of the 16 base vowels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct VowelHistogram([usize; 16]);

impl VowelHistogram {
    pub fn from_syllables<'a>(syllables: impl IntoIterator<Item = &'a Syllable>) -> Self {
        let mut counts = [0; 16];
        for s in syllables {
            counts[decompose_final(s.final_).vowel.index()] += 1;
        }
        VowelHistogram(counts)
    }

    pub fn count(&self, v: Vowel) -> usize {
        self.0[v.index()]
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }
}

impl fmt::Display for VowelHistogram {
    /// One `vowel count` line per vowel, in corpus-table column order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in Vowel::HISTOGRAM_ORDER {
            writeln!(f, "{v}\t{}", self.count(v))?;
        }
        Ok(())
    }
}

pub fn vowel_histogram(corpus: &Corpus, syllabary: &Syllabary) -> Result<VowelHistogram> {
    Ok(VowelHistogram::from_syllables(&corpus.parse(syllabary)?))
}
