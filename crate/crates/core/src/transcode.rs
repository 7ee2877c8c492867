//! Syllable to cue conversion.
//!
//! A final that starts with i, u or ü is split into a semiconsonant, cued by
//! handshape, and one of the 16 base vowels, cued by hand position. Tones
//! become head movements carried by the vowel-bearing cue.

use std::fmt;

use crate::error::{Error, Result};
use crate::inventory::{ConsonantTable, CueUnit, Handshape, Position, SemiCombinability, VowelAllocation};
use crate::phonology::{Final, Initial, Semiconsonant, Tone, Vowel};
use crate::pinyin::{Syllabary, Syllable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FinalDecomposition {
    pub semi: Option<Semiconsonant>,
    pub vowel: Vowel,
}

pub fn decompose_final(f: Final) -> FinalDecomposition {
    use Semiconsonant::{Yw, J, W};
    let (semi, vowel) = match f {
        Final::Ia => (J, Vowel::A),
        Final::Ua => (W, Vowel::A),
        Final::Uo => (W, Vowel::O),
        Final::Ie => (J, Vowel::E),
        Final::Yue => (Yw, Vowel::E),
        Final::Uai => (W, Vowel::Ai),
        Final::Uei => (W, Vowel::Ei),
        Final::Iao => (J, Vowel::Ao),
        Final::Iou => (J, Vowel::Ou),
        Final::Ian => (J, Vowel::An),
        Final::Uan => (W, Vowel::An),
        Final::Yuan => (Yw, Vowel::An),
        Final::In => (J, Vowel::En),
        Final::Uen => (W, Vowel::En),
        Final::Yun => (Yw, Vowel::En),
        Final::Iang => (J, Vowel::Ang),
        Final::Uang => (W, Vowel::Ang),
        Final::Ing => (J, Vowel::Eng),
        Final::Ueng => (W, Vowel::Eng),
        Final::Iong => (J, Vowel::Ong),
        base => {
            return FinalDecomposition {
                semi: None,
                vowel: base.as_vowel().expect("remaining finals are base vowels"),
            }
        }
    };
    FinalDecomposition {
        semi: Some(semi),
        vowel,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HeadMove {
    Still,
    Right,
    Up,
    DownUp,
    Down,
}

impl HeadMove {
    pub fn as_str(self) -> &'static str {
        match self {
            HeadMove::Still => "none",
            HeadMove::Right => "right",
            HeadMove::Up => "up",
            HeadMove::DownUp => "downUp",
            HeadMove::Down => "down",
        }
    }
}

impl fmt::Display for HeadMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn tone_to_head_move(t: Tone) -> HeadMove {
    match t.value() {
        0 => HeadMove::Still,
        1 => HeadMove::Right,
        2 => HeadMove::Up,
        3 => HeadMove::DownUp,
        _ => HeadMove::Down,
    }
}

/// One hand cue. `head_move` is set only on the token that carries the vowel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CueToken {
    pub handshape: Handshape,
    pub position: Position,
    pub head_move: Option<HeadMove>,
}

impl fmt::Display for CueToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mv = self.head_move.map_or("-", HeadMove::as_str);
        write!(f, "{}:{}:{}", self.handshape, self.position, mv)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Warning {
    /// The initial is not expected before this semiconsonant.
    NotCombinable { initial: Initial, semi: Semiconsonant },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::NotCombinable { initial, semi } => write!(f, "not-combinable:{initial}+{semi}"),
        }
    }
}

/// The tables a transcoder reads from.
#[derive(Debug, Clone)]
pub struct CueTables {
    pub allocation: VowelAllocation,
    pub consonants: ConsonantTable,
    pub combinability: SemiCombinability,
    pub syllabary: Syllabary,
}

impl Default for CueTables {
    fn default() -> Self {
        CueTables {
            allocation: VowelAllocation::final_allocation(),
            consonants: ConsonantTable::standard().clone(),
            combinability: SemiCombinability::standard(),
            syllabary: Syllabary::standard().clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Transcription {
    pub tokens: Vec<CueToken>,
    pub warnings: Vec<Warning>,
}

fn handshape(tables: &CueTables, unit: CueUnit) -> Result<Handshape> {
    tables
        .consonants
        .get(unit)
        .ok_or_else(|| Error::Incomplete(format!("no handshape for {unit}")))
}

pub fn transcode_syllable(s: &Syllable, tables: &CueTables) -> Result<Transcription> {
    let FinalDecomposition { semi, vowel } = decompose_final(s.final_);
    let position = tables
        .allocation
        .get(vowel)
        .ok_or_else(|| Error::Incomplete(format!("no position for vowel {vowel}")))?;
    let head_move = Some(tone_to_head_move(s.tone));
    let mut warnings = Vec::new();

    let tokens = match (s.initial, semi) {
        (Some(i), Some(j)) => {
            if !tables.combinability.can_precede(i, j) {
                warnings.push(Warning::NotCombinable { initial: i, semi: j });
            }
            vec![
                CueToken {
                    handshape: handshape(tables, i.into())?,
                    position: Position::P2,
                    head_move: None,
                },
                CueToken {
                    handshape: handshape(tables, j.into())?,
                    position,
                    head_move,
                },
            ]
        }
        (Some(i), None) => vec![CueToken {
            handshape: handshape(tables, i.into())?,
            position,
            head_move,
        }],
        (None, Some(j)) => vec![CueToken {
            handshape: handshape(tables, j.into())?,
            position,
            head_move,
        }],
        (None, None) => vec![CueToken {
            handshape: tables.consonants.isolated_vowel,
            position,
            head_move,
        }],
    };
    Ok(Transcription { tokens, warnings })
}

/// One output record per syllable.
#[derive(Debug, Clone, PartialEq)]
pub struct SyllableRecord {
    /// Character offset of the syllable in the input text.
    pub offset: usize,
    pub syllable: Syllable,
    pub decomposition: FinalDecomposition,
    pub transcription: Transcription,
}

impl SyllableRecord {
    /// Tab-separated: offset, source, initial, final, tone, apical variant,
    /// space-separated `handshape:position:headmove` tokens, and warnings
    /// when there are any.
    pub fn to_line(&self) -> String {
        let s = &self.syllable;
        let tokens: Vec<String> = self.transcription.tokens.iter().map(ToString::to_string).collect();
        let mut line = format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
            self.offset,
            s.source,
            s.initial.map_or("-", Initial::as_str),
            s.final_,
            s.tone,
            s.apical,
            tokens.join(" ")
        );
        if !self.transcription.warnings.is_empty() {
            let w: Vec<String> = self.transcription.warnings.iter().map(ToString::to_string).collect();
            line.push('\t');
            line.push_str(&w.join(","));
        }
        line
    }
}

pub fn transcode_text(text: &str, tables: &CueTables) -> Result<Vec<SyllableRecord>> {
    let spans = tables.syllabary.segment_spans(text)?;
    spans
        .into_iter()
        .map(|span| {
            let syllable = tables
                .syllabary
                .parse_syllable(&span.text)
                .map_err(|e| e.at(span.offset))?;
            let transcription = transcode_syllable(&syllable, tables).map_err(|e| e.at(span.offset))?;
            Ok(SyllableRecord {
                offset: span.offset,
                decomposition: decompose_final(syllable.final_),
                syllable,
                transcription,
            })
        })
        .collect()
}

/// Like [`transcode_text`], but each whitespace-separated chunk stands on its
/// own: a chunk that fails is reported and the rest are still transcoded.
pub fn transcode_text_lenient(text: &str, tables: &CueTables) -> (Vec<SyllableRecord>, Vec<Error>) {
    let mut records = Vec::new();
    let mut errors = Vec::new();
    let mut chunk_start = None;
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    for (ci, &(_, c)) in chars
        .iter()
        .enumerate()
        .chain(std::iter::once((chars.len(), &(text.len(), ' '))))
    {
        match (c.is_whitespace(), chunk_start) {
            (false, None) => chunk_start = Some(ci),
            (true, Some(start)) => {
                let chunk = &text[chars[start].0..chars.get(ci).map_or(text.len(), |p| p.0)];
                match transcode_text(chunk, tables) {
                    Ok(rs) => records.extend(rs.into_iter().map(|mut r| {
                        r.offset += start;
                        r
                    })),
                    Err(e) => errors.push(e.shifted(start)),
                }
                chunk_start = None;
            }
            _ => {}
        }
    }
    (records, errors)
}

/// Human-readable summary of the whole cue system.
pub fn chart(tables: &CueTables) -> String {
    let mut out = String::from("Hand positions (vowels)\n");
    for p in Position::ALL {
        let vs: Vec<&str> = tables.allocation.members(p).iter().map(|v| v.as_str()).collect();
        out.push_str(&format!("  {p} {:<6} {}\n", p.name(), vs.join(" ")));
    }
    out.push_str("Handshapes (consonants)\n");
    for h in Handshape::all() {
        let mut units: Vec<String> = tables.consonants.members(h).iter().map(ToString::to_string).collect();
        if h == tables.consonants.isolated_vowel {
            units.push("*".into());
        }
        out.push_str(&format!("  {h}  {}\n", units.join(" ")));
    }
    out.push_str("  * isolated vowel\n");
    out.push_str("Tones (head movements)\n");
    for t in Tone::all() {
        out.push_str(&format!("  {t}  {}\n", tone_to_head_move(t)));
    }
    out
}
