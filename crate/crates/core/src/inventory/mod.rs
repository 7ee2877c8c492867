//! Hand positions, handshapes, and the tables that assign vowels and
//! consonants to them, together with the rules those tables must obey.
//!
//! The tables themselves are replaceable data. What carries weight is the
//! pair of verifiers: [`verify_vowel_allocation`] and
//! [`verify_consonant_table`] report every broken rule as a value instead
//! of failing, so alternates loaded from disk can be inspected.

mod solver;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::phonology::{Initial, Semiconsonant, Vowel};

pub use solver::{solve_consonant_table, LPC_ANCHORS};

/// Hand position near the face; each codes a group of vowels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Position {
    P1,
    P2,
    P3,
    P4,
    P5,
}

impl Position {
    pub const ALL: [Position; 5] = [Position::P1, Position::P2, Position::P3, Position::P4, Position::P5];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Position::P1 => "cheek",
            Position::P2 => "side",
            Position::P3 => "mouth",
            Position::P4 => "chin",
            Position::P5 => "neck",
        }
    }

    pub fn id(self) -> &'static str {
        match self {
            Position::P1 => "P1",
            Position::P2 => "P2",
            Position::P3 => "P3",
            Position::P4 => "P4",
            Position::P5 => "P5",
        }
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Position {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        Position::ALL
            .into_iter()
            .find(|p| p.id().eq_ignore_ascii_case(s) || p.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown position `{s}`"))
    }
}

/// Handshape number, 1 through 8.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Handshape(u8);

impl Handshape {
    pub const COUNT: u8 = 8;

    pub fn new(n: u8) -> Option<Handshape> {
        (1..=Self::COUNT).contains(&n).then_some(Handshape(n))
    }

    pub fn number(self) -> u8 {
        self.0
    }

    pub fn all() -> impl Iterator<Item = Handshape> {
        (1..=Self::COUNT).map(Handshape)
    }
}

impl fmt::Display for Handshape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for Handshape {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.trim()
            .parse::<u8>()
            .ok()
            .and_then(Handshape::new)
            .ok_or_else(|| format!("handshape must be 1-8, got `{}`", s.trim()))
    }
}

/// Anything coded by a handshape: an initial or a semiconsonant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CueUnit {
    Initial(Initial),
    Semi(Semiconsonant),
}

impl CueUnit {
    pub fn all() -> impl Iterator<Item = CueUnit> {
        Initial::ALL
            .iter()
            .map(|&i| CueUnit::Initial(i))
            .chain(Semiconsonant::ALL.iter().map(|&s| CueUnit::Semi(s)))
    }
}

impl fmt::Display for CueUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CueUnit::Initial(i) => write!(f, "{i}"),
            CueUnit::Semi(s) => write!(f, "{s}"),
        }
    }
}

impl FromStr for CueUnit {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.starts_with('[') {
            Semiconsonant::parse(s).map(CueUnit::Semi)
        } else {
            Initial::from_pinyin(s).map(CueUnit::Initial)
        }
        .ok_or_else(|| format!("unknown consonant `{s}`"))
    }
}

impl From<Initial> for CueUnit {
    fn from(i: Initial) -> Self {
        CueUnit::Initial(i)
    }
}

impl From<Semiconsonant> for CueUnit {
    fn from(s: Semiconsonant) -> Self {
        CueUnit::Semi(s)
    }
}

/// Parses `key=value` lines, skipping blanks and `#` comments.
fn parse_assignments<'a>(text: &'a str) -> impl Iterator<Item = Result<(usize, &'a str, &'a str)>> + 'a {
    text.lines().enumerate().filter_map(|(idx, line)| {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            return None;
        }
        Some(
            line.split_once('=')
                .map(|(k, v)| (idx + 1, k.trim(), v.trim()))
                .ok_or_else(|| Error::format(idx + 1, format!("expected `key=value`, got `{line}`"))),
        )
    })
}

/// Assignment of base vowels to hand positions.
///
/// The map may be partial when loaded from a file; totality is one of the
/// properties [`verify_vowel_allocation`] checks.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VowelAllocation {
    map: BTreeMap<Vowel, Position>,
}

impl VowelAllocation {
    pub fn from_groups(groups: &[(Position, &[Vowel])]) -> Self {
        let map = groups
            .iter()
            .flat_map(|(p, vs)| vs.iter().map(move |&v| (v, *p)))
            .collect();
        VowelAllocation { map }
    }

    /// Allocation derived from the French system, with e, o, en, eng and er
    /// placed by lip-shape contrast.
    pub fn preliminary() -> Self {
        use Vowel::*;
        Self::from_groups(&[
            (Position::P1, &[An, E, O]),
            (Position::P2, &[A, Ou, En, Er]),
            (Position::P3, &[I, Ong, Ang]),
            (Position::P4, &[Ai, U, Ao]),
            (Position::P5, &[Yu, Ei, Eng]),
        ])
    }

    /// The preliminary allocation after exchanging ong with ü and eng with en.
    pub fn final_allocation() -> Self {
        Self::preliminary()
            .with_swap(Vowel::Ong, Vowel::Yu)
            .with_swap(Vowel::Eng, Vowel::En)
    }

    pub fn get(&self, v: Vowel) -> Option<Position> {
        self.map.get(&v).copied()
    }

    pub fn set(&mut self, v: Vowel, p: Position) {
        self.map.insert(v, p);
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Vowels at `p`, in canonical vowel order.
    pub fn members(&self, p: Position) -> Vec<Vowel> {
        self.map.iter().filter(|(_, &q)| q == p).map(|(&v, _)| v).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Vowel, Position)> + '_ {
        self.map.iter().map(|(&v, &p)| (v, p))
    }

    /// Exchanges the positions of two vowels. A vowel without a position is
    /// left untouched.
    pub fn swap(&mut self, a: Vowel, b: Vowel) {
        if let (Some(pa), Some(pb)) = (self.get(a), self.get(b)) {
            self.map.insert(a, pb);
            self.map.insert(b, pa);
        }
    }

    pub fn with_swap(mut self, a: Vowel, b: Vowel) -> Self {
        self.swap(a, b);
        self
    }

    /// Vowels whose position differs between the two allocations.
    pub fn differences(&self, other: &VowelAllocation) -> Vec<Vowel> {
        Vowel::ALL
            .iter()
            .copied()
            .filter(|&v| self.get(v) != other.get(v))
            .collect()
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for entry in parse_assignments(text) {
            let (line, k, v) = entry?;
            let vowel = Vowel::parse_lenient(k).ok_or_else(|| Error::format(line, format!("unknown vowel `{k}`")))?;
            let pos: Position = v.parse().map_err(|e: String| Error::format(line, e))?;
            if map.insert(vowel, pos).is_some() {
                return Err(Error::format(line, format!("vowel `{vowel}` assigned twice")));
            }
        }
        Ok(VowelAllocation { map })
    }

    pub fn to_text(&self) -> String {
        self.map.iter().map(|(v, p)| format!("{v}={p}\n")).collect()
    }
}

impl fmt::Display for VowelAllocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let groups: Vec<String> = Position::ALL
            .iter()
            .map(|&p| {
                let vs: Vec<&str> = self.members(p).iter().map(|v| v.as_str()).collect();
                format!("{p}:{{{}}}", vs.join(","))
            })
            .collect();
        f.write_str(&groups.join(" "))
    }
}

/// Constraints a vowel allocation must satisfy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VowelRules {
    pub capacities: [usize; 5],
    /// Positions where `er` may go.
    pub er_positions: Vec<Position>,
    /// Pairs with similar lip shapes, stored with the smaller vowel first.
    pub confusable: BTreeSet<(Vowel, Vowel)>,
    /// Confusable pairs tolerated in one position because they never follow
    /// the same consonants.
    pub complementary: BTreeSet<(Vowel, Vowel)>,
}

const DEFAULT_VOWEL_PAIRS: &str = include_str!("../../data/vowel_pairs.txt");

fn ordered<T: Ord>(a: T, b: T) -> (T, T) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

impl VowelRules {
    /// Parses `vowel,vowel,kind` lines where kind is `confusable` or
    /// `complementary`.
    pub fn from_pair_text(text: &str) -> Result<Self> {
        let mut confusable = BTreeSet::new();
        let mut complementary = BTreeSet::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            let [a, b, kind] = fields[..] else {
                return Err(Error::format(idx + 1, "expected `vowel,vowel,kind`"));
            };
            let parse =
                |s: &str| Vowel::parse_lenient(s).ok_or_else(|| Error::format(idx + 1, format!("unknown vowel `{s}`")));
            let pair = ordered(parse(a)?, parse(b)?);
            match kind {
                "confusable" => confusable.insert(pair),
                "complementary" => complementary.insert(pair),
                other => return Err(Error::format(idx + 1, format!("unknown pair kind `{other}`"))),
            };
        }
        Ok(VowelRules {
            capacities: [3, 4, 3, 3, 3],
            er_positions: vec![Position::P2, Position::P4, Position::P5],
            confusable,
            complementary,
        })
    }

    pub fn standard() -> &'static VowelRules {
        static RULES: OnceLock<VowelRules> = OnceLock::new();
        RULES.get_or_init(|| VowelRules::from_pair_text(DEFAULT_VOWEL_PAIRS).expect("shipped vowel pairs parse"))
    }

    pub fn forbids(&self, a: Vowel, b: Vowel) -> bool {
        let pair = ordered(a, b);
        self.confusable.contains(&pair) && !self.complementary.contains(&pair)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VowelViolation {
    Missing(Vowel),
    Capacity {
        position: Position,
        expected: usize,
        found: usize,
    },
    ErPlacement(Position),
    Confusable {
        position: Position,
        a: Vowel,
        b: Vowel,
    },
}

impl fmt::Display for VowelViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VowelViolation::Missing(v) => write!(f, "totality: vowel {v} has no position"),
            VowelViolation::Capacity {
                position,
                expected,
                found,
            } => {
                write!(f, "capacity: {position} holds {found} vowels, expected {expected}")
            }
            VowelViolation::ErPlacement(p) => write!(f, "placement: er in {p}, allowed only in P2, P4 or P5"),
            VowelViolation::Confusable { position, a, b } => {
                write!(f, "confusable: {a} and {b} share {position}")
            }
        }
    }
}

pub fn verify_vowel_allocation(alloc: &VowelAllocation, rules: &VowelRules) -> Vec<VowelViolation> {
    let mut out = Vec::new();
    for &v in Vowel::ALL {
        if alloc.get(v).is_none() {
            out.push(VowelViolation::Missing(v));
        }
    }
    for p in Position::ALL {
        let found = alloc.members(p).len();
        let expected = rules.capacities[p.index()];
        if found != expected {
            out.push(VowelViolation::Capacity {
                position: p,
                expected,
                found,
            });
        }
    }
    if let Some(p) = alloc.get(Vowel::Er) {
        if !rules.er_positions.contains(&p) {
            out.push(VowelViolation::ErPlacement(p));
        }
    }
    for p in Position::ALL {
        let members = alloc.members(p);
        for (i, &a) in members.iter().enumerate() {
            for &b in &members[i + 1..] {
                if rules.forbids(a, b) {
                    out.push(VowelViolation::Confusable { position: p, a, b });
                }
            }
        }
    }
    out
}

/// Which semiconsonants each initial may precede.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemiCombinability {
    table: BTreeMap<Initial, BTreeSet<Semiconsonant>>,
}

impl SemiCombinability {
    /// The standard Mandarin onset combinations.
    pub fn standard() -> Self {
        use Initial::*;
        use Semiconsonant::{Yw as Sy, J as Sj, W as Sw};
        let rows: [(&[Initial], &[Semiconsonant]); 5] = [
            (&[B, P, M, F], &[Sj]),
            (&[D, T, N, L], &[Sj, Sw, Sy]),
            (&[G, K, H], &[Sw]),
            (&[J, Q, X], &[Sj, Sy]),
            (&[Zh, Ch, Sh, R, Z, C, S], &[Sw]),
        ];
        let table = rows
            .iter()
            .flat_map(|(inits, semis)| inits.iter().map(move |&i| (i, semis.iter().copied().collect())))
            .collect();
        SemiCombinability { table }
    }

    pub fn can_precede(&self, initial: Initial, semi: Semiconsonant) -> bool {
        self.table.get(&initial).is_some_and(|s| s.contains(&semi))
    }

    /// Total number of permitted (initial, semiconsonant) combinations.
    pub fn count(&self) -> usize {
        self.table.values().map(BTreeSet::len).sum()
    }
}

/// Lip-shape class of each consonant cue unit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VisemeClasses {
    map: BTreeMap<CueUnit, String>,
}

const DEFAULT_VISEMES: &str = include_str!("../../data/visemes.txt");

impl VisemeClasses {
    pub fn from_text(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for entry in parse_assignments(text) {
            let (line, k, v) = entry?;
            let unit: CueUnit = k.parse().map_err(|e: String| Error::format(line, e))?;
            map.insert(unit, v.to_string());
        }
        Ok(VisemeClasses { map })
    }

    pub fn standard() -> &'static VisemeClasses {
        static CLASSES: OnceLock<VisemeClasses> = OnceLock::new();
        CLASSES.get_or_init(|| VisemeClasses::from_text(DEFAULT_VISEMES).expect("shipped viseme classes parse"))
    }

    pub fn class(&self, unit: CueUnit) -> Option<&str> {
        self.map.get(&unit).map(String::as_str)
    }
}

/// Everything [`verify_consonant_table`] checks against.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConsonantRules {
    pub capacity: usize,
    pub combinability: SemiCombinability,
    pub visemes: VisemeClasses,
    /// Combinable pairs allowed to share a handshape.
    pub tolerated: Vec<(Initial, Semiconsonant)>,
    /// Pairs that must share a handshape.
    pub paired: Vec<(CueUnit, CueUnit)>,
}

impl ConsonantRules {
    pub fn standard() -> Self {
        ConsonantRules {
            capacity: 3,
            combinability: SemiCombinability::standard(),
            visemes: VisemeClasses::standard().clone(),
            tolerated: vec![(Initial::L, Semiconsonant::W)],
            paired: vec![(CueUnit::Initial(Initial::L), CueUnit::Semi(Semiconsonant::W))],
        }
    }

    pub(crate) fn tolerates(&self, i: Initial, s: Semiconsonant) -> bool {
        self.tolerated.contains(&(i, s))
    }
}

/// Assignment of the 24 consonant cue units to handshapes, plus the
/// handshape used for a vowel with nothing before it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ConsonantTable {
    map: BTreeMap<CueUnit, Handshape>,
    pub isolated_vowel: Handshape,
}

const DEFAULT_CONSONANTS: &str = include_str!("../../data/consonants.txt");

/// Key used for the isolated-vowel handshape in the text format.
pub const ISOLATED_KEY: &str = "*";

impl ConsonantTable {
    pub fn new(map: BTreeMap<CueUnit, Handshape>, isolated_vowel: Handshape) -> Self {
        ConsonantTable { map, isolated_vowel }
    }

    /// The shipped table: solver output anchored on the French groups.
    pub fn standard() -> &'static ConsonantTable {
        static TABLE: OnceLock<ConsonantTable> = OnceLock::new();
        TABLE.get_or_init(|| ConsonantTable::from_text(DEFAULT_CONSONANTS).expect("shipped consonant table parses"))
    }

    pub fn get(&self, unit: impl Into<CueUnit>) -> Option<Handshape> {
        self.map.get(&unit.into()).copied()
    }

    pub fn set(&mut self, unit: impl Into<CueUnit>, h: Handshape) {
        self.map.insert(unit.into(), h);
    }

    pub fn remove(&mut self, unit: impl Into<CueUnit>) -> Option<Handshape> {
        self.map.remove(&unit.into())
    }

    pub fn members(&self, h: Handshape) -> Vec<CueUnit> {
        self.map.iter().filter(|(_, &g)| g == h).map(|(&u, _)| u).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (CueUnit, Handshape)> + '_ {
        self.map.iter().map(|(&u, &h)| (u, h))
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        let mut isolated = None;
        for entry in parse_assignments(text) {
            let (line, k, v) = entry?;
            let h: Handshape = v.parse().map_err(|e: String| Error::format(line, e))?;
            if k == ISOLATED_KEY {
                isolated = Some(h);
                continue;
            }
            let unit: CueUnit = k.parse().map_err(|e: String| Error::format(line, e))?;
            if map.insert(unit, h).is_some() {
                return Err(Error::format(line, format!("consonant `{unit}` assigned twice")));
            }
        }
        Ok(ConsonantTable {
            map,
            isolated_vowel: isolated.unwrap_or(Handshape(5)),
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for unit in CueUnit::all() {
            if let Some(h) = self.get(unit) {
                out.push_str(&format!("{unit}={h}\n"));
            }
        }
        out.push_str(&format!("{ISOLATED_KEY}={}\n", self.isolated_vowel));
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConsonantViolation {
    Missing(CueUnit),
    Capacity {
        handshape: Handshape,
        units: Vec<CueUnit>,
    },
    CoOccurrence {
        consonant: Initial,
        semi: Semiconsonant,
        handshape: Handshape,
    },
    SemisShareHandshape {
        a: Semiconsonant,
        b: Semiconsonant,
        handshape: Handshape,
    },
    SharedViseme {
        handshape: Handshape,
        a: CueUnit,
        b: CueUnit,
        class: String,
    },
    PairSplit {
        a: CueUnit,
        b: CueUnit,
    },
}

impl fmt::Display for ConsonantViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConsonantViolation::Missing(u) => write!(f, "totality: consonant {u} has no handshape"),
            ConsonantViolation::Capacity { handshape, units } => {
                let names: Vec<String> = units.iter().map(ToString::to_string).collect();
                write!(
                    f,
                    "capacity: handshape {handshape} holds {} units ({})",
                    units.len(),
                    names.join(",")
                )
            }
            ConsonantViolation::CoOccurrence {
                consonant,
                semi,
                handshape,
            } => {
                write!(f, "co-occurrence: ({consonant},{semi}) share handshape {handshape}")
            }
            ConsonantViolation::SemisShareHandshape { a, b, handshape } => {
                write!(f, "semiconsonants: {a} and {b} share handshape {handshape}")
            }
            ConsonantViolation::SharedViseme { handshape, a, b, class } => {
                write!(f, "viseme: {a} and {b} are both {class} in handshape {handshape}")
            }
            ConsonantViolation::PairSplit { a, b } => write!(f, "pairing: ({a},{b}) must share a handshape"),
        }
    }
}

pub fn verify_consonant_table(table: &ConsonantTable, rules: &ConsonantRules) -> Vec<ConsonantViolation> {
    let mut out = Vec::new();
    for unit in CueUnit::all() {
        if table.get(unit).is_none() {
            out.push(ConsonantViolation::Missing(unit));
        }
    }
    for h in Handshape::all() {
        let units = table.members(h);
        if units.len() > rules.capacity {
            out.push(ConsonantViolation::Capacity { handshape: h, units });
        }
    }
    for &i in Initial::ALL {
        for s in Semiconsonant::ALL {
            if !rules.combinability.can_precede(i, s) || rules.tolerates(i, s) {
                continue;
            }
            if let (Some(a), Some(b)) = (table.get(i), table.get(s)) {
                if a == b {
                    out.push(ConsonantViolation::CoOccurrence {
                        consonant: i,
                        semi: s,
                        handshape: a,
                    });
                }
            }
        }
    }
    for (k, &a) in Semiconsonant::ALL.iter().enumerate() {
        for &b in &Semiconsonant::ALL[k + 1..] {
            if let (Some(ha), Some(hb)) = (table.get(a), table.get(b)) {
                if ha == hb {
                    out.push(ConsonantViolation::SemisShareHandshape { a, b, handshape: ha });
                }
            }
        }
    }
    for h in Handshape::all() {
        let units = table.members(h);
        for (k, &a) in units.iter().enumerate() {
            for &b in &units[k + 1..] {
                match (rules.visemes.class(a), rules.visemes.class(b)) {
                    (Some(ca), Some(cb)) if ca == cb => out.push(ConsonantViolation::SharedViseme {
                        handshape: h,
                        a,
                        b,
                        class: ca.to_string(),
                    }),
                    _ => {}
                }
            }
        }
    }
    for &(a, b) in &rules.paired {
        if table.get(a) != table.get(b) || table.get(a).is_none() {
            out.push(ConsonantViolation::PairSplit { a, b });
        }
    }
    out
}
