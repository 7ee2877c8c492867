//! Local search over vowel allocations.
//!
//! Moves are pairwise swaps between positions that keep the allocation
//! valid. Every candidate is scored with the same seed, so two allocations
//! that share a position's vowel group share that position's score, and
//! scores are memoized per (position, group).

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Mutex;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::inventory::{verify_vowel_allocation, Position, VowelAllocation, VowelRules};
use crate::lip::{evaluate_vowels, EvalConfig, EvalReport, PositionScore, VowelClouds};
use crate::phonology::Vowel;

/// Smallest score gain the hill climber treats as an improvement.
pub const MIN_GAIN: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SwapMove {
    pub a: Vowel,
    pub b: Vowel,
}

impl SwapMove {
    pub fn new(a: Vowel, b: Vowel) -> Self {
        SwapMove { a, b }
    }

    pub fn apply(&self, alloc: &VowelAllocation) -> VowelAllocation {
        alloc.clone().with_swap(self.a, self.b)
    }

    /// Same pair regardless of order.
    pub fn same_pair(&self, a: Vowel, b: Vowel) -> bool {
        (self.a, self.b) == (a, b) || (self.a, self.b) == (b, a)
    }
}

impl fmt::Display for SwapMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}<->{}", self.a, self.b)
    }
}

/// An accepted move and the score change it caused.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceStep {
    pub swap: SwapMove,
    pub delta: f64,
}

impl fmt::Display for TraceStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "swap {} {:+.4}", self.swap, self.delta)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub best: VowelAllocation,
    /// `best` re-scored with the final repetition count.
    pub score: EvalReport,
    pub trace: Vec<TraceStep>,
}

impl SearchResult {
    pub fn swaps(&self) -> Vec<SwapMove> {
        self.trace.iter().map(|t| t.swap).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchConfig {
    /// Evaluation used while searching.
    pub eval: EvalConfig,
    /// Repetitions for the closing re-score of the result.
    pub final_repetitions: usize,
    pub max_iters: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            eval: EvalConfig::default().with_repetitions(20),
            final_repetitions: 100,
            max_iters: 50,
        }
    }
}

impl SearchConfig {
    pub fn with_seed(seed: u64) -> Self {
        let mut cfg = Self::default();
        cfg.eval.seed = seed;
        cfg
    }
}

/// Average separability of an allocation.
pub fn score(clouds: &VowelClouds, alloc: &VowelAllocation, cfg: &EvalConfig) -> Result<f64> {
    Ok(crate::lip::evaluate_allocation(clouds, alloc, cfg)?.average)
}

fn group_key(vowels: &[Vowel]) -> u16 {
    vowels.iter().fold(0, |k, v| k | (1 << v.index()))
}

/// Memoizing allocation scorer.
struct Scorer<'a> {
    clouds: &'a VowelClouds,
    cfg: EvalConfig,
    memo: Mutex<HashMap<(Position, u16), PositionScore>>,
}

impl<'a> Scorer<'a> {
    fn new(clouds: &'a VowelClouds, cfg: EvalConfig) -> Self {
        Scorer {
            clouds,
            cfg,
            memo: Mutex::new(HashMap::new()),
        }
    }

    /// Fills the memo for every group of the given allocations, in parallel.
    fn prepare(&self, allocs: &[&VowelAllocation]) -> Result<()> {
        let mut missing: Vec<(Position, Vec<Vowel>)> = Vec::new();
        {
            let memo = self.memo.lock().expect("memo lock");
            let mut seen = HashSet::new();
            for a in allocs {
                for p in Position::ALL {
                    let vs = a.members(p);
                    let key = (p, group_key(&vs));
                    if !memo.contains_key(&key) && seen.insert(key) {
                        missing.push((p, vs));
                    }
                }
            }
        }
        let scored = missing
            .par_iter()
            .map(|(p, vs)| {
                evaluate_vowels(self.clouds, vs, &self.cfg, p.index() as u32).map(|s| ((*p, group_key(vs)), s))
            })
            .collect::<Result<Vec<_>>>()?;
        self.memo.lock().expect("memo lock").extend(scored);
        Ok(())
    }

    fn report(&self, alloc: &VowelAllocation) -> Result<EvalReport> {
        self.prepare(&[alloc])?;
        let memo = self.memo.lock().expect("memo lock");
        let mut per = [PositionScore::default(); 5];
        for p in Position::ALL {
            per[p.index()] = memo[&(p, group_key(&alloc.members(p)))];
        }
        Ok(EvalReport::new(per))
    }

    fn score(&self, alloc: &VowelAllocation) -> Result<f64> {
        Ok(self.report(alloc)?.average)
    }
}

/// Swaps of vowels in different positions whose result still verifies, in
/// canonical pair order.
pub fn valid_swaps(alloc: &VowelAllocation, rules: &VowelRules) -> Vec<(SwapMove, VowelAllocation)> {
    let mut out = Vec::new();
    for (i, &a) in Vowel::ALL.iter().enumerate() {
        for &b in &Vowel::ALL[i + 1..] {
            if alloc.get(a) == alloc.get(b) {
                continue;
            }
            let m = SwapMove::new(a, b);
            let next = m.apply(alloc);
            if verify_vowel_allocation(&next, rules).is_empty() {
                out.push((m, next));
            }
        }
    }
    out
}

fn check_start(start: &VowelAllocation, rules: &VowelRules) -> Result<()> {
    let violations = verify_vowel_allocation(start, rules);
    if violations.is_empty() {
        return Ok(());
    }
    let text: Vec<String> = violations.iter().map(ToString::to_string).collect();
    Err(Error::Constraint(text.join("; ")))
}

fn finish(
    clouds: &VowelClouds,
    best: VowelAllocation,
    trace: Vec<TraceStep>,
    cfg: &SearchConfig,
) -> Result<SearchResult> {
    let final_cfg = cfg.eval.with_repetitions(cfg.final_repetitions);
    let score = crate::lip::evaluate_allocation(clouds, &best, &final_cfg)?;
    Ok(SearchResult { best, score, trace })
}

/// Steepest-ascent hill climbing: each round scores every valid swap and
/// takes the best one if it gains more than [`MIN_GAIN`]. Ties go to the
/// swap that comes first in canonical pair order.
pub fn hill_climb(
    clouds: &VowelClouds,
    start: &VowelAllocation,
    rules: &VowelRules,
    cfg: &SearchConfig,
) -> Result<SearchResult> {
    check_start(start, rules)?;
    let scorer = Scorer::new(clouds, cfg.eval);
    let mut current = start.clone();
    let mut current_score = scorer.score(&current)?;
    let mut trace = Vec::new();

    for _ in 0..cfg.max_iters {
        let candidates = valid_swaps(&current, rules);
        scorer.prepare(&candidates.iter().map(|(_, a)| a).collect::<Vec<_>>())?;
        let mut best: Option<(SwapMove, VowelAllocation, f64)> = None;
        for (m, next) in candidates {
            let s = scorer.score(&next)?;
            if best.as_ref().is_none_or(|(_, _, b)| s > *b) {
                best = Some((m, next, s));
            }
        }
        match best {
            Some((m, next, s)) if s - current_score > MIN_GAIN => {
                trace.push(TraceStep {
                    swap: m,
                    delta: s - current_score,
                });
                current = next;
                current_score = s;
            }
            _ => break,
        }
    }
    finish(clouds, current, trace, cfg)
}

/// Scores every allocation reachable from `start` by at most `depth` valid
/// swaps and returns the best, with the swap path that first reached it.
///
/// With about 60 valid swaps per allocation, depth 2 visits at most
/// 1 + 120 + 120^2 allocations; memoization keeps the distinct position
/// evaluations far below that.
pub fn exhaustive_swap_search(
    clouds: &VowelClouds,
    start: &VowelAllocation,
    rules: &VowelRules,
    depth: usize,
    cfg: &SearchConfig,
) -> Result<SearchResult> {
    check_start(start, rules)?;
    let scorer = Scorer::new(clouds, cfg.eval);

    // breadth-first, keeping the first path that reaches each allocation
    let mut visited: HashSet<VowelAllocation> = HashSet::from([start.clone()]);
    let mut order: Vec<(VowelAllocation, Vec<SwapMove>)> = vec![(start.clone(), Vec::new())];
    let mut frontier = vec![0usize];
    for _ in 0..depth {
        let mut next_frontier = Vec::new();
        for &i in &frontier {
            let (alloc, path) = order[i].clone();
            for (m, next) in valid_swaps(&alloc, rules) {
                if visited.insert(next.clone()) {
                    let mut p = path.clone();
                    p.push(m);
                    next_frontier.push(order.len());
                    order.push((next, p));
                }
            }
        }
        frontier = next_frontier;
    }

    scorer.prepare(&order.iter().map(|(a, _)| a).collect::<Vec<_>>())?;
    let mut best = 0;
    let mut best_score = scorer.score(start)?;
    for (i, (alloc, _)) in order.iter().enumerate().skip(1) {
        let s = scorer.score(alloc)?;
        if s - best_score > MIN_GAIN {
            best = i;
            best_score = s;
        }
    }

    let (best_alloc, path) = order.swap_remove(best);
    let mut trace = Vec::with_capacity(path.len());
    let mut at = start.clone();
    let mut at_score = scorer.score(&at)?;
    for m in path {
        at = m.apply(&at);
        let s = scorer.score(&at)?;
        trace.push(TraceStep {
            swap: m,
            delta: s - at_score,
        });
        at_score = s;
    }
    finish(clouds, best_alloc, trace, cfg)
}
