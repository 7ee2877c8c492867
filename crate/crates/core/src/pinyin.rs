//! Pinyin normalization, parsing, rendering and segmentation.
//!
//! Input is lower- or upper-case Pinyin with either tone marks (`ā á ǎ à`,
//! precomposed or combining) or a trailing tone digit `0`–`5`; `5` and a
//! missing tone both mean the neutral tone. `v` is read as `ü`.
//!
//! Spelling conventions are undone before lookup so that every syllable is
//! stored with its underlying final: `wai` is `∅ + uai`, `you` is `∅ + iou`,
//! `jun` is `j + ün`, `gui` is `g + uei`. Uncontracted spellings such as
//! `xiou` and explicit `jü` are accepted as well.

use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::phonology::{ApicalVariant, Final, Initial, Tone};

/// A parsed syllable.
///
/// Equality and hashing consider only the phonological content; `source`
/// records how the syllable was spelled and is ignored.
#[derive(Debug, Clone)]
pub struct Syllable {
    pub initial: Option<Initial>,
    pub final_: Final,
    pub tone: Tone,
    pub apical: ApicalVariant,
    pub source: String,
}

impl Syllable {
    /// Builds a syllable from its parts, deriving the apical variant.
    pub fn new(initial: Option<Initial>, final_: Final, tone: Tone) -> Self {
        let mut s = Syllable {
            initial,
            final_,
            tone,
            apical: ApicalVariant::for_pair(initial, final_),
            source: String::new(),
        };
        s.source = render_syllable(&s);
        s
    }
}

impl PartialEq for Syllable {
    fn eq(&self, other: &Self) -> bool {
        self.initial == other.initial
            && self.final_ == other.final_
            && self.tone == other.tone
            && self.apical == other.apical
    }
}

impl Eq for Syllable {}

impl Hash for Syllable {
    fn hash<H: Hasher>(&self, state: &mut H) {
        (self.initial, self.final_, self.tone, self.apical).hash(state);
    }
}

impl fmt::Display for Syllable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_syllable(self))
    }
}

/// The set of valid (initial, final) pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Syllabary {
    pairs: BTreeSet<(Option<Initial>, Final)>,
}

const DEFAULT_SYLLABARY: &str = include_str!("../data/syllabary.txt");

impl Syllabary {
    /// Parses `initial,final` lines; `-` stands for no initial. Blank lines
    /// and `#` comments are skipped.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut pairs = BTreeSet::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (ini, fin) = line
                .split_once(',')
                .ok_or_else(|| Error::format(idx + 1, format!("expected `initial,final`, got `{line}`")))?;
            let initial = match ini.trim() {
                "-" => None,
                s => Some(
                    Initial::from_pinyin(s).ok_or_else(|| Error::format(idx + 1, format!("unknown initial `{s}`")))?,
                ),
            };
            let fin = fin.trim();
            let fin =
                Final::from_pinyin(fin).ok_or_else(|| Error::format(idx + 1, format!("unknown final `{fin}`")))?;
            pairs.insert((initial, fin));
        }
        Ok(Syllabary { pairs })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, f) in &self.pairs {
            out.push_str(i.map_or("-", Initial::as_str));
            out.push(',');
            out.push_str(f.as_str());
            out.push('\n');
        }
        out
    }

    /// The shipped standard inventory.
    pub fn standard() -> &'static Syllabary {
        static TABLE: OnceLock<Syllabary> = OnceLock::new();
        TABLE.get_or_init(|| Syllabary::from_text(DEFAULT_SYLLABARY).expect("shipped syllabary parses"))
    }

    pub fn contains(&self, initial: Option<Initial>, fin: Final) -> bool {
        self.pairs.contains(&(initial, fin))
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Option<Initial>, Final)> + '_ {
        self.pairs.iter().copied()
    }

    pub fn parse_syllable(&self, raw: &str) -> Result<Syllable> {
        let (body, tone) = strip_tone(raw)?;
        let (initial, fin) = self
            .split_body(&body)
            .ok_or_else(|| Error::InvalidSyllable { text: raw.to_string() })?;
        Ok(Syllable {
            initial,
            final_: fin,
            tone,
            apical: ApicalVariant::for_pair(initial, fin),
            source: raw.to_string(),
        })
    }

    fn split_body(&self, body: &str) -> Option<(Option<Initial>, Final)> {
        let (initial, rest) = split_initial(body);
        let fin = Final::from_pinyin(&normalize_final(initial, rest)?)?;
        self.contains(initial, fin).then_some((initial, fin))
    }

    /// Splits text into candidate syllable strings, each keeping its tone
    /// annotation.
    pub fn segment(&self, text: &str) -> Result<Vec<String>> {
        Ok(self.segment_spans(text)?.into_iter().map(|s| s.text).collect())
    }

    /// Like [`Syllabary::segment`], also reporting the character offset of
    /// each syllable in `text`.
    pub fn segment_spans(&self, text: &str) -> Result<Vec<Span>> {
        let chars: Vec<char> = text.chars().collect();
        let mut spans = Vec::new();
        let mut run_start = None;
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            if is_separator(c) {
                if let Some(start) = run_start.take() {
                    self.segment_run(&chars, start, i, i, &mut spans)?;
                }
            } else if c.is_ascii_digit() {
                let start = run_start.take().ok_or_else(|| Error::Unsegmentable {
                    span: c.to_string(),
                    offset: i,
                })?;
                self.segment_run(&chars, start, i, i + 1, &mut spans)?;
            } else if run_start.is_none() {
                run_start = Some(i);
            }
            i += 1;
        }
        if let Some(start) = run_start {
            self.segment_run(&chars, start, chars.len(), chars.len(), &mut spans)?;
        }
        Ok(spans)
    }

    /// Segments `chars[start..end]` by longest match with backtracking; the
    /// last syllable extends to `tail` so it picks up a tone digit.
    fn segment_run(&self, chars: &[char], start: usize, end: usize, tail: usize, out: &mut Vec<Span>) -> Result<()> {
        let run = &chars[start..end];
        let mut dead = vec![false; run.len() + 1];
        let mut cuts = Vec::new();
        if !self.cut(run, 0, &mut dead, &mut cuts) {
            return Err(Error::Unsegmentable {
                span: chars[start..tail].iter().collect(),
                offset: start,
            });
        }
        let mut from = 0;
        for (k, &to) in cuts.iter().enumerate() {
            let to_abs = if k + 1 == cuts.len() { tail - start } else { to };
            out.push(Span {
                offset: start + from,
                text: chars[start + from..start + to_abs].iter().collect(),
            });
            from = to;
        }
        Ok(())
    }

    fn cut(&self, run: &[char], pos: usize, dead: &mut [bool], cuts: &mut Vec<usize>) -> bool {
        if pos == run.len() {
            return true;
        }
        if dead[pos] {
            return false;
        }
        let max = (run.len() - pos).min(MAX_SYLLABLE_CHARS);
        for len in (1..=max).rev() {
            let end = pos + len;
            if end < run.len() && is_combining(run[end]) {
                continue;
            }
            let candidate: String = run[pos..end].iter().collect();
            let ok = strip_tone(&candidate)
                .ok()
                .and_then(|(body, _)| self.split_body(&body))
                .is_some();
            if ok {
                cuts.push(end);
                if self.cut(run, end, dead, cuts) {
                    return true;
                }
                cuts.pop();
            }
        }
        dead[pos] = true;
        false
    }
}

/// A segmented syllable and its character offset in the source text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Span {
    pub offset: usize,
    pub text: String,
}

// "zhuang" plus two combining marks.
const MAX_SYLLABLE_CHARS: usize = 8;

fn is_separator(c: char) -> bool {
    c.is_whitespace() || matches!(c, '\'' | '’' | '‘' | '-' | ',' | '.' | ';' | ':' | '!' | '?')
}

fn is_combining(c: char) -> bool {
    matches!(c, '\u{0300}' | '\u{0301}' | '\u{0304}' | '\u{030C}' | '\u{0308}')
}

fn marked_vowel(c: char) -> Option<(char, u8)> {
    let (base, tone) = match c {
        'ā' => ('a', 1),
        'á' => ('a', 2),
        'ǎ' => ('a', 3),
        'à' => ('a', 4),
        'ē' => ('e', 1),
        'é' => ('e', 2),
        'ě' => ('e', 3),
        'è' => ('e', 4),
        'ī' => ('i', 1),
        'í' => ('i', 2),
        'ǐ' => ('i', 3),
        'ì' => ('i', 4),
        'ō' => ('o', 1),
        'ó' => ('o', 2),
        'ǒ' => ('o', 3),
        'ò' => ('o', 4),
        'ū' => ('u', 1),
        'ú' => ('u', 2),
        'ǔ' => ('u', 3),
        'ù' => ('u', 4),
        'ǖ' => ('ü', 1),
        'ǘ' => ('ü', 2),
        'ǚ' => ('ü', 3),
        'ǜ' => ('ü', 4),
        _ => return None,
    };
    Some((base, tone))
}

/// Removes the tone annotation, returning the bare lowercase body with `v`
/// replaced by `ü`.
fn strip_tone(raw: &str) -> Result<(String, Tone)> {
    let bad_tone = || Error::InvalidTone { text: raw.to_string() };
    let bad_syllable = || Error::InvalidSyllable { text: raw.to_string() };
    let lower = raw.trim().to_lowercase();
    let chars: Vec<char> = lower.chars().collect();
    let mut body = String::new();
    let mut mark: Option<u8> = None;
    let mut digit: Option<u8> = None;
    for (i, &c) in chars.iter().enumerate() {
        let set_mark = |mark: &mut Option<u8>, t: u8| {
            if mark.replace(t).is_some() {
                Err(bad_tone())
            } else {
                Ok(())
            }
        };
        match c {
            '0'..='9' => {
                if i + 1 != chars.len() {
                    return Err(bad_syllable());
                }
                digit = Some(c as u8 - b'0');
            }
            '\u{0304}' => set_mark(&mut mark, 1)?,
            '\u{0301}' => set_mark(&mut mark, 2)?,
            '\u{030C}' => set_mark(&mut mark, 3)?,
            '\u{0300}' => set_mark(&mut mark, 4)?,
            '\u{0308}' => {
                if body.pop() != Some('u') {
                    return Err(bad_syllable());
                }
                body.push('ü');
            }
            'v' => body.push('ü'),
            c => match marked_vowel(c) {
                Some((base, t)) => {
                    set_mark(&mut mark, t)?;
                    body.push(base);
                }
                None if c.is_alphabetic() => body.push(c),
                None => return Err(bad_syllable()),
            },
        }
    }
    if body.is_empty() {
        return Err(bad_syllable());
    }
    let tone = match (mark, digit) {
        (Some(_), Some(_)) => return Err(bad_tone()),
        (Some(t), None) => Tone::new(t).ok_or_else(bad_tone)?,
        (None, Some(d)) => Tone::new(d).ok_or_else(bad_tone)?,
        (None, None) => Tone::NEUTRAL,
    };
    Ok((body, tone))
}

fn split_initial(body: &str) -> (Option<Initial>, &str) {
    for len in [2, 1] {
        if let Some(prefix) = body.get(..len) {
            if let Some(i) = Initial::from_pinyin(prefix) {
                return (Some(i), &body[len..]);
            }
        }
    }
    (None, body)
}

/// Undoes y/w spelling, ü-dropping after j/q/x and the iu/ui/un
/// contractions, yielding the underlying final string.
fn normalize_final(initial: Option<Initial>, rest: &str) -> Option<String> {
    if rest.is_empty() {
        return None;
    }
    let fin = match initial {
        None => {
            if let Some(r) = rest.strip_prefix("yu").or_else(|| rest.strip_prefix("yü")) {
                format!("ü{r}")
            } else if let Some(r) = rest.strip_prefix("yi") {
                format!("i{r}")
            } else if let Some(r) = rest.strip_prefix('y') {
                format!("i{r}")
            } else if let Some(r) = rest.strip_prefix("wu") {
                format!("u{r}")
            } else if let Some(r) = rest.strip_prefix('w') {
                format!("u{r}")
            } else if rest.starts_with(['i', 'u', 'ü']) {
                return None;
            } else {
                rest.to_string()
            }
        }
        Some(i) => {
            let rest = match rest.strip_prefix('u') {
                Some(r) if i.is_palatal() => format!("ü{r}"),
                _ => rest.to_string(),
            };
            match rest.as_str() {
                "iu" => "iou".to_string(),
                "ui" => "uei".to_string(),
                "un" => "uen".to_string(),
                _ => rest,
            }
        }
    };
    Some(fin)
}

fn written_body(initial: Option<Initial>, fin: Final) -> String {
    let f = fin.as_str();
    match initial {
        None => match fin {
            Final::I => "yi".into(),
            Final::U => "wu".into(),
            Final::Yu => "yu".into(),
            Final::In | Final::Ing => format!("y{f}"),
            _ => {
                if let Some(r) = f.strip_prefix('ü') {
                    format!("yu{r}")
                } else if let Some(r) = f.strip_prefix('i') {
                    format!("y{r}")
                } else if let Some(r) = f.strip_prefix('u') {
                    format!("w{r}")
                } else {
                    f.to_string()
                }
            }
        },
        Some(i) => {
            let rest = match fin {
                Final::Iou => "iu".to_string(),
                Final::Uei => "ui".to_string(),
                Final::Uen => "un".to_string(),
                _ if i.is_palatal() => f.replacen('ü', "u", 1),
                _ => f.to_string(),
            };
            format!("{i}{rest}")
        }
    }
}

/// Parses one syllable against the standard syllabary.
pub fn parse_syllable(raw: &str) -> Result<Syllable> {
    Syllabary::standard().parse_syllable(raw)
}

/// Canonical spelling with a trailing tone digit (`0` for neutral).
pub fn render_syllable(s: &Syllable) -> String {
    format!("{}{}", written_body(s.initial, s.final_), s.tone)
}

/// Segments against the standard syllabary.
pub fn segment(text: &str) -> Result<Vec<String>> {
    Syllabary::standard().segment(text)
}

/// True iff the pair is in the standard syllabary.
pub fn validate(initial: Option<Initial>, fin: Final) -> bool {
    Syllabary::standard().contains(initial, fin)
}
