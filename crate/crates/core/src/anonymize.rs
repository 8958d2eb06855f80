//! Chunked k-degree anonymization of a degree sequence.
//!
//! The sorted sequence is cut into consecutive chunks of at least `k`
//! positions. Each chunk picks an anchor (the member degree closest to the
//! chunk mean) and a window of width `t` that contains the anchor. Every
//! member is moved the minimal distance into its chunk's window, so all
//! members end up within `t` of each other and each vertex shares its degree
//! range with at least `k - 1` others.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::sequence::{DegreeSequence, TargetSequence};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AnonymizationParams {
    /// Anonymity level: minimum number of vertices sharing a degree range.
    pub k: usize,
    /// Degree-range tolerance.
    pub t: usize,
}

impl AnonymizationParams {
    pub fn new(k: usize, t: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::Parameter(format!("k must be at least 2, got {k}")));
        }
        Ok(AnonymizationParams { k, t })
    }

    fn check(&self, n: usize) -> Result<()> {
        if self.k < 2 {
            return Err(Error::Parameter(format!("k must be at least 2, got {}", self.k)));
        }
        if self.k > n {
            return Err(Error::Parameter(format!(
                "k = {} exceeds the number of vertices {n}",
                self.k
            )));
        }
        Ok(())
    }
}

/// One chunk of the sorted sequence and the edit budget of its members.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChunkParams {
    /// First sorted position (inclusive).
    pub start: usize,
    /// Last sorted position (inclusive).
    pub end: usize,
    pub anchor: usize,
    /// Target window `[lower, upper]`, `upper - lower <= t`.
    pub lower: usize,
    pub upper: usize,
    /// Maximum edge additions per member (`a`): the largest change any
    /// member needs plus [`DETOUR_ROOM`].
    pub max_additions: usize,
    /// Maximum edge deletions per member (`d`).
    pub max_deletions: usize,
}

impl ChunkParams {
    pub fn len(&self) -> usize {
        self.end - self.start + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Per-vertex signed degree change `D' - D`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChangeVector {
    pub theta: Vec<i64>,
}

impl ChangeVector {
    pub fn zeros(n: usize) -> Self {
        ChangeVector { theta: vec![0; n] }
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    pub fn sum(&self) -> i64 {
        self.theta.iter().sum()
    }

    /// `Σ |θ(v)|`.
    pub fn l1(&self) -> i64 {
        self.theta.iter().map(|x| x.abs()).sum()
    }
}

impl From<Vec<i64>> for ChangeVector {
    fn from(theta: Vec<i64>) -> Self {
        ChangeVector { theta }
    }
}

/// Per-vertex edit caps handed to the realizer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VertexCaps {
    pub additions: Vec<usize>,
    pub deletions: Vec<usize>,
}

impl VertexCaps {
    /// The same `(a, d)` for every vertex.
    pub fn uniform(n: usize, a: usize, d: usize) -> Self {
        VertexCaps {
            additions: vec![a; n],
            deletions: vec![d; n],
        }
    }

    pub fn len(&self) -> usize {
        self.additions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.additions.is_empty()
    }
}

/// Result of anonymizing a sequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Anonymization {
    /// `D'` in descending order, tied to vertices.
    pub target: TargetSequence,
    pub chunks: Vec<ChunkParams>,
    /// Target value for each position of the *input* sequence.
    positional: Vec<usize>,
}

impl Anonymization {
    /// Target value for each position of the input sequence.
    pub fn positional_targets(&self) -> &[usize] {
        &self.positional
    }

    /// Caps `(a, d)` for every vertex, taken from its chunk. Overrides replace
    /// the chunk values globally.
    pub fn vertex_caps(
        &self,
        seq: &DegreeSequence,
        override_additions: Option<usize>,
        override_deletions: Option<usize>,
    ) -> VertexCaps {
        let n = seq.len();
        let mut caps = VertexCaps::uniform(n, 0, 0);
        for chunk in &self.chunks {
            for pos in chunk.start..=chunk.end {
                let v = seq.order()[pos];
                caps.additions[v] = override_additions.unwrap_or(chunk.max_additions);
                caps.deletions[v] = override_deletions.unwrap_or(chunk.max_deletions);
            }
        }
        caps
    }
}

/// Cuts `n` sorted positions into runs of `k`; the last run absorbs the remainder.
pub fn partition_chunks(n: usize, k: usize) -> Result<Vec<(usize, usize)>> {
    AnonymizationParams { k, t: 0 }.check(n)?;
    let count = n / k;
    Ok((0..count)
        .map(|c| {
            let start = c * k;
            let end = if c + 1 == count { n - 1 } else { start + k - 1 };
            (start, end)
        })
        .collect())
}

/// Anonymizes a descending sequence.
///
/// Targets never exceed `max(len - 1, max value)`, so sequences taken from a
/// graph stay within `[0, n - 1]`.
pub fn anonymize_sequence(seq: &DegreeSequence, params: AnonymizationParams) -> Result<Anonymization> {
    let n = seq.len();
    params.check(n)?;
    let values = seq.values();
    let ceiling = degree_ceiling(values);
    let t = params.t;

    let mut chunks = Vec::new();
    let mut positional = values.to_vec();
    for (start, end) in partition_chunks(n, params.k)? {
        let members = &values[start..=end];
        let anchor = pick_anchor(members);
        let lower = best_window(members, anchor, t, ceiling);
        let upper = (lower + t).min(ceiling);
        for pos in start..=end {
            positional[pos] = values[pos].clamp(lower, upper);
        }
        chunks.push(ChunkParams {
            start,
            end,
            anchor,
            lower,
            upper,
            max_additions: 0,
            max_deletions: 0,
        });
    }
    Ok(finish(seq, chunks, positional))
}

/// Adjusts an anonymization so the target degrees sum to an even number.
///
/// A degree sequence with odd sum has no realization, so this is applied
/// before a strict realization. The cheapest single change that flips parity
/// is chosen: moving one member by one inside its window, or sliding a whole
/// chunk window by one. Every chunk still lies in a width-`t` window.
#[allow(clippy::needless_range_loop)]
pub fn repair_parity(seq: &DegreeSequence, anon: &Anonymization, t: usize) -> Anonymization {
    let values = seq.values();
    let total: usize = anon.positional.iter().sum();
    if total.is_multiple_of(2) {
        return anon.clone();
    }
    let ceiling = degree_ceiling(values);

    // (extra cost, vertices touched, chunk index, change)
    let mut best: Option<(i64, usize, usize, Fix)> = None;
    let mut offer = |cost: i64, touched: usize, ci: usize, fix: Fix| {
        let better = match &best {
            None => true,
            Some((c, tch, _, _)) => (cost, touched) < (*c, *tch),
        };
        if better {
            best = Some((cost, touched, ci, fix));
        }
    };

    for (ci, chunk) in anon.chunks.iter().enumerate() {
        for pos in chunk.start..=chunk.end {
            let cur = anon.positional[pos] as i64;
            let orig = values[pos] as i64;
            for step in [-1i64, 1] {
                let next = cur + step;
                if next < chunk.lower as i64 || next > chunk.upper as i64 {
                    continue;
                }
                let cost = (next - orig).abs() - (cur - orig).abs();
                offer(
                    cost,
                    1,
                    ci,
                    Fix::Member {
                        pos,
                        value: next as usize,
                    },
                );
            }
        }
        let members = &values[chunk.start..=chunk.end];
        let old_cost = window_cost(members, chunk.lower, t);
        let old_sum: usize = anon.positional[chunk.start..=chunk.end].iter().sum();
        for step in [-1i64, 1] {
            let lower = chunk.lower as i64 + step;
            if lower < 0 || lower as usize + t > ceiling {
                continue;
            }
            let lower = lower as usize;
            let upper = (lower + t).min(ceiling);
            let new_sum: usize = members.iter().map(|&v| v.clamp(lower, upper)).sum();
            if (new_sum + old_sum).is_multiple_of(2) {
                continue;
            }
            let touched = members
                .iter()
                .zip(&anon.positional[chunk.start..=chunk.end])
                .filter(|(&v, &cur)| v.clamp(lower, upper) != cur)
                .count();
            let cost = window_cost(members, lower, t) as i64 - old_cost as i64;
            offer(cost, touched, ci, Fix::Shift { lower });
        }
    }

    let mut positional = anon.positional.clone();
    let mut chunks = anon.chunks.clone();
    if let Some((_, _, ci, fix)) = best {
        let chunk = &mut chunks[ci];
        match fix {
            Fix::Member { pos, value } => positional[pos] = value,
            Fix::Shift { lower } => {
                chunk.lower = lower;
                chunk.upper = (lower + t).min(ceiling);
                for pos in chunk.start..=chunk.end {
                    positional[pos] = values[pos].clamp(chunk.lower, chunk.upper);
                }
            }
        }
    }
    finish(seq, chunks, positional)
}

#[derive(Debug, Clone, Copy)]
enum Fix {
    Member { pos: usize, value: usize },
    Shift { lower: usize },
}

/// `θ(v) = D'(v) - D(v)`, matching vertices through each sequence's order.
pub fn change_vector(seq: &DegreeSequence, target: &TargetSequence) -> Result<ChangeVector> {
    if seq.len() != target.len() {
        return Err(Error::LengthMismatch {
            expected: seq.len(),
            actual: target.len(),
        });
    }
    let before = seq.by_vertex();
    let after = target.by_vertex();
    Ok(ChangeVector {
        theta: after.iter().zip(&before).map(|(&a, &b)| a as i64 - b as i64).collect(),
    })
}

/// True iff every entry has at least `k - 1` other entries within `±t`.
pub fn verify_k_anonymous(values: &[usize], k: usize, t: usize) -> bool {
    if k <= 1 {
        return true;
    }
    let mut sorted = values.to_vec();
    sorted.sort_unstable();
    sorted.iter().all(|&x| {
        let lo = sorted.partition_point(|&y| y + t < x);
        let hi = sorted.partition_point(|&y| y <= x + t);
        hi - lo > k - 1
    })
}

fn degree_ceiling(values: &[usize]) -> usize {
    let max = values.iter().copied().max().unwrap_or(0);
    max.max(values.len().saturating_sub(1))
}

/// Member value closest to the chunk mean; ties go to the larger value.
fn pick_anchor(members: &[usize]) -> usize {
    let size = members.len() as i128;
    let sum: i128 = members.iter().map(|&v| v as i128).sum();
    *members
        .iter()
        .min_by(|&&a, &&b| {
            let da = (a as i128 * size - sum).abs();
            let db = (b as i128 * size - sum).abs();
            da.cmp(&db).then(b.cmp(&a))
        })
        .expect("chunks are never empty")
}

fn window_cost(members: &[usize], lower: usize, t: usize) -> usize {
    let upper = lower + t;
    members
        .iter()
        .map(|&v| lower.saturating_sub(v) + v.saturating_sub(upper))
        .sum()
}

/// Lower end of the width-`t` window containing `anchor` with least total
/// movement. The cost is convex in the lower end, so only breakpoints are
/// examined; among equal-cost windows the one most centred on the anchor wins.
fn best_window(members: &[usize], anchor: usize, t: usize, ceiling: usize) -> usize {
    if t >= ceiling {
        return 0;
    }
    let lo_min = anchor.saturating_sub(t);
    let lo_max = anchor.min(ceiling - t);
    let mut candidates = vec![lo_min, lo_max];
    for &v in members {
        candidates.push(v.clamp(lo_min, lo_max));
        candidates.push(v.saturating_sub(t).clamp(lo_min, lo_max));
    }
    let mut best_cost = usize::MAX;
    let (mut left, mut right) = (lo_max, lo_min);
    for &c in &candidates {
        let cost = window_cost(members, c, t);
        if cost < best_cost {
            best_cost = cost;
            left = c;
            right = c;
        } else if cost == best_cost {
            left = left.min(c);
            right = right.max(c);
        }
    }
    anchor.saturating_sub(t / 2).clamp(left, right)
}

/// Budget on top of the largest change a chunk needs. One extra addition
/// and deletion per vertex lets a realization route an edit through a
/// vertex whose own degree stays put, which parity often forces.
pub const DETOUR_ROOM: usize = 1;

fn finish(seq: &DegreeSequence, mut chunks: Vec<ChunkParams>, positional: Vec<usize>) -> Anonymization {
    let values = seq.values();
    for chunk in &mut chunks {
        let (mut up, mut down) = (0, 0);
        for pos in chunk.start..=chunk.end {
            let (old, new) = (values[pos], positional[pos]);
            up = up.max(new.saturating_sub(old));
            down = down.max(old.saturating_sub(new));
        }
        let budget = up.max(down) + DETOUR_ROOM;
        chunk.max_additions = budget;
        chunk.max_deletions = budget;
    }
    let mut per_vertex = vec![0; seq.len()];
    for (pos, &v) in seq.order().iter().enumerate() {
        per_vertex[v] = positional[pos];
    }
    Anonymization {
        target: DegreeSequence::from_vertex_degrees(&per_vertex),
        chunks,
        positional,
    }
}
