//! Phonological inventory: initials, finals, base vowels, semiconsonants and tones.

use std::fmt;
use std::str::FromStr;

macro_rules! string_enum {
    ($(#[$meta:meta])* $name:ident { $($variant:ident => $text:expr),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum $name {
            $($variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn as_str(self) -> &'static str {
                match self {
                    $($name::$variant => $text),+
                }
            }

            pub fn from_pinyin(s: &str) -> Option<Self> {
                match s {
                    $($text => Some($name::$variant),)+
                    _ => None,
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }
    };
}

string_enum! {
    /// The 21 syllable-initial consonants.
    Initial {
        B => "b", P => "p", M => "m", F => "f",
        D => "d", T => "t", N => "n", L => "l",
        G => "g", K => "k", H => "h",
        J => "j", Q => "q", X => "x",
        Zh => "zh", Ch => "ch", Sh => "sh", R => "r",
        Z => "z", C => "c", S => "s",
    }
}

string_enum! {
    /// The 36 finals, written in their underlying (uncontracted) form.
    Final {
        A => "a", O => "o", E => "e", I => "i", U => "u", Yu => "ü",
        Ai => "ai", Ei => "ei", Ao => "ao", Ou => "ou",
        An => "an", En => "en", Ang => "ang", Eng => "eng", Ong => "ong", Er => "er",
        Ia => "ia", Ua => "ua", Uo => "uo", Ie => "ie", Yue => "üe",
        Uai => "uai", Uei => "uei", Iao => "iao", Iou => "iou",
        Ian => "ian", Uan => "uan", Yuan => "üan",
        In => "in", Uen => "uen", Yun => "ün",
        Iang => "iang", Uang => "uang", Ing => "ing", Ueng => "ueng", Iong => "iong",
    }
}

string_enum! {
    /// The 16 base vowels left once leading i/u/ü glides are split off.
    ///
    /// Variant order is the crate-wide canonical vowel order, used for
    /// deterministic tie-breaking and for listing.
    Vowel {
        A => "a", O => "o", E => "e", I => "i", U => "u", Yu => "ü",
        Ai => "ai", Ei => "ei", Ao => "ao", Ou => "ou",
        An => "an", En => "en", Ang => "ang", Eng => "eng", Ong => "ong", Er => "er",
    }
}

impl Vowel {
    /// Column order of the corpus occurrence table.
    pub const HISTOGRAM_ORDER: [Vowel; 16] = [
        Vowel::A,
        Vowel::O,
        Vowel::E,
        Vowel::I,
        Vowel::U,
        Vowel::Yu,
        Vowel::Ai,
        Vowel::Ei,
        Vowel::Ang,
        Vowel::Eng,
        Vowel::Ong,
        Vowel::An,
        Vowel::En,
        Vowel::Er,
        Vowel::Ou,
        Vowel::Ao,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Accepts `v` as a keyboard stand-in for `ü`.
    pub fn parse_lenient(s: &str) -> Option<Self> {
        let s = s.trim();
        if s.contains('v') {
            Vowel::from_pinyin(&s.replace('v', "ü"))
        } else {
            Vowel::from_pinyin(s)
        }
    }
}

impl FromStr for Vowel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Vowel::parse_lenient(s).ok_or_else(|| format!("unknown vowel `{s}`"))
    }
}

impl Final {
    pub fn as_vowel(self) -> Option<Vowel> {
        Vowel::from_pinyin(self.as_str())
    }
}

impl From<Vowel> for Final {
    fn from(v: Vowel) -> Self {
        Final::from_pinyin(v.as_str()).expect("every base vowel is a final")
    }
}

impl Initial {
    pub fn is_retroflex(self) -> bool {
        matches!(self, Initial::Zh | Initial::Ch | Initial::Sh | Initial::R)
    }

    pub fn is_dental_sibilant(self) -> bool {
        matches!(self, Initial::Z | Initial::C | Initial::S)
    }

    pub fn is_palatal(self) -> bool {
        matches!(self, Initial::J | Initial::Q | Initial::X)
    }
}

/// Glides [j], [w], [ɥ] that replace a leading i, u, ü of a compound final.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Semiconsonant {
    J,
    W,
    Yw,
}

impl Semiconsonant {
    pub const ALL: [Semiconsonant; 3] = [Semiconsonant::J, Semiconsonant::W, Semiconsonant::Yw];

    pub fn ipa(self) -> &'static str {
        match self {
            Semiconsonant::J => "[j]",
            Semiconsonant::W => "[w]",
            Semiconsonant::Yw => "[ɥ]",
        }
    }

    /// Accepts the bracketed IPA form, with or without brackets.
    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().trim_start_matches('[').trim_end_matches(']') {
            "j" => Some(Semiconsonant::J),
            "w" => Some(Semiconsonant::W),
            "ɥ" => Some(Semiconsonant::Yw),
            _ => None,
        }
    }
}

impl fmt::Display for Semiconsonant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.ipa())
    }
}

/// Lexical tone, 0 being the neutral tone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tone(u8);

impl Tone {
    pub const NEUTRAL: Tone = Tone(0);

    /// Digit 5 is an alias for the neutral tone.
    pub fn new(value: u8) -> Option<Tone> {
        match value {
            0..=4 => Some(Tone(value)),
            5 => Some(Tone(0)),
            _ => None,
        }
    }

    pub fn value(self) -> u8 {
        self.0
    }

    pub fn all() -> impl Iterator<Item = Tone> {
        (0..=4).map(Tone)
    }
}

impl fmt::Display for Tone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Apical realization of final `i` after sibilants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum ApicalVariant {
    #[default]
    None,
    /// [ɿ] after z, c, s
    Dental,
    /// [ʅ] after zh, ch, sh, r
    Retroflex,
}

impl ApicalVariant {
    pub fn for_pair(initial: Option<Initial>, fin: Final) -> Self {
        match (initial, fin) {
            (Some(i), Final::I) if i.is_dental_sibilant() => ApicalVariant::Dental,
            (Some(i), Final::I) if i.is_retroflex() => ApicalVariant::Retroflex,
            _ => ApicalVariant::None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ApicalVariant::None => "none",
            ApicalVariant::Dental => "dental",
            ApicalVariant::Retroflex => "retroflex",
        }
    }
}

impl fmt::Display for ApicalVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn inventory_sizes() {
        assert_eq!(Initial::ALL.len(), 21);
        assert_eq!(Final::ALL.len(), 36);
        assert_eq!(Vowel::ALL.len(), 16);
        let finals: HashSet<_> = Final::ALL.iter().map(|f| f.as_str()).collect();
        assert!(Initial::ALL.iter().all(|i| !finals.contains(i.as_str())));
    }

    #[test]
    fn every_vowel_is_a_final() {
        for &v in Vowel::ALL {
            assert_eq!(Final::from(v).as_vowel(), Some(v));
        }
        let mut order = Vowel::HISTOGRAM_ORDER.to_vec();
        order.sort();
        assert_eq!(order, Vowel::ALL);
    }

    #[test]
    fn tone_five_is_neutral() {
        assert_eq!(Tone::new(5), Some(Tone::NEUTRAL));
        assert_eq!(Tone::new(6), None);
    }

    #[test]
    fn v_stands_for_u_umlaut() {
        assert_eq!("v".parse::<Vowel>(), Ok(Vowel::Yu));
        assert_eq!(Semiconsonant::parse("[ɥ]"), Some(Semiconsonant::Yw));
    }
}
