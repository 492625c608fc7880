//! Backtracking search for nets refining a template.
//!
//! Lines are added one at a time following a [`SearchStrategy`]. Each
//! step covers an uncovered point of the class being extended, choosing the
//! point that lies on the fewest remaining candidate lines.
//! A branch is cut as soon as some point still to be covered in a class lies
//! on no remaining candidate of that class.

mod orbits;

pub use orbits::{
    choose_strategy, compute_orbits, line_image, preferred_square_order, refine_nets, refine_template,
    sym_break_search, Orbit, RefineOptions, RefinePlan, StrategyChoice, SymmetryMode,
};

use crate::netcore::{Line, PartialNet};
use crate::templates::Template;
use crate::PointSet;

/// Which candidate lines a template admits for a class.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CandidateRule {
    /// Lines lying entirely in the ones or entirely in the zeros of the square.
    Monochromatic,
    /// Monochromatic lines that also meet the ones of every other square
    /// `λ` times, as every line of a refining net must.
    Balanced,
}

/// Candidate lines of class `class >= 2`, in line order.
pub fn candidate_lines(t: &Template, class: usize) -> Vec<PointSet> {
    candidate_lines_with(t, class, CandidateRule::Balanced)
}

pub fn candidate_lines_with(t: &Template, class: usize, rule: CandidateRule) -> Vec<PointSet> {
    let mut out = candidate_lines_colored(t, class, rule, false);
    out.extend(candidate_lines_colored(t, class, rule, true));
    out.sort();
    out
}

/// Candidate lines through the zeros (`relational == false`) or the ones of
/// the square of `class`.
pub fn candidate_lines_colored(t: &Template, class: usize, rule: CandidateRule, relational: bool) -> Vec<PointSet> {
    assert!(class >= 2 && class < t.k(), "class {class} has no square");
    let n = t.order();
    let s = class - 2;
    let m = t.square_count();
    let others: Vec<usize> = match rule {
        CandidateRule::Monochromatic => Vec::new(),
        CandidateRule::Balanced => (0..m).filter(|&o| o != s).collect(),
    };
    let targets: Vec<usize> = others.iter().map(|&o| t.lambdas()[o + 2]).collect();
    let mut out = Vec::new();
    let mut counts = vec![0usize; others.len()];
    #[allow(clippy::too_many_arguments)]
    fn rec(
        t: &Template,
        r: usize,
        used: u32,
        line: PointSet,
        s: usize,
        relational: bool,
        others: &[usize],
        targets: &[usize],
        counts: &mut [usize],
        out: &mut Vec<PointSet>,
    ) {
        let n = t.order();
        if r == n {
            out.push(line);
            return;
        }
        let left = n - r - 1;
        for c in 0..n {
            if used >> c & 1 == 1 || t.bit(s, r, c) != relational {
                continue;
            }
            let ok = others.iter().zip(targets).zip(counts.iter()).all(|((&o, &want), &have)| {
                let now = have + t.bit(o, r, c) as usize;
                now <= want && now + left >= want
            });
            if !ok {
                continue;
            }
            for (i, &o) in others.iter().enumerate() {
                counts[i] += t.bit(o, r, c) as usize;
            }
            let mut next = line;
            next.insert(r * n + c);
            rec(t, r + 1, used | 1 << c, next, s, relational, others, targets, counts, out);
            for (i, &o) in others.iter().enumerate() {
                counts[i] -= t.bit(o, r, c) as usize;
            }
        }
    }
    if n > 0 {
        rec(t, 0, 0, PointSet::EMPTY, s, relational, &others, &targets, &mut counts, &mut out);
    }
    out.sort();
    out
}

/// Candidate lines per class; classes 0 and 1 are left empty.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidateSets {
    pub n: usize,
    pub lines: Vec<Vec<PointSet>>,
    /// Points each class must cover: the whole grid for a class to be
    /// completed, the relational points for a class given only its
    /// relational lines.
    pub cover: Vec<PointSet>,
}

impl CandidateSets {
    /// Candidates for every square of the template.
    pub fn of_template(t: &Template) -> Self {
        let mut lines = vec![Vec::new(), Vec::new()];
        for c in 2..t.k() {
            lines.push(candidate_lines(t, c));
        }
        CandidateSets::new(t.order(), lines)
    }

    /// Every permutation line in each of `k - 2` classes (no template).
    pub fn unconstrained(n: usize, k: usize) -> Self {
        let t = Template::trivial(n, k - 2).expect("supported order");
        let mut lines = vec![Vec::new(), Vec::new()];
        for c in 2..k {
            lines.push(candidate_lines_with(&t, c, CandidateRule::Monochromatic));
        }
        CandidateSets::new(n, lines)
    }

    /// Sets with every class covering the whole grid.
    pub fn new(n: usize, lines: Vec<Vec<PointSet>>) -> Self {
        let cover = vec![PointSet::full(n * n); lines.len()];
        CandidateSets { n, lines, cover }
    }

    pub fn class(&self, c: usize) -> &[PointSet] {
        &self.lines[c]
    }

    pub fn total(&self) -> usize {
        self.lines.iter().map(Vec::len).sum()
    }

    /// Keeps only lines compatible with placing `line`: disjoint from it in its
    /// own class and meeting it once elsewhere.
    pub fn filter_against(&self, line: Line) -> Self {
        let lines = self
            .lines
            .iter()
            .enumerate()
            .map(|(c, ls)| filter_class(ls, c, line))
            .collect();
        CandidateSets {
            n: self.n,
            lines,
            cover: self.cover.clone(),
        }
    }
}

fn filter_class(ls: &[PointSet], class: usize, line: Line) -> Vec<PointSet> {
    if class == line.class {
        ls.iter().copied().filter(|l| l.is_disjoint(line.points)).collect()
    } else {
        ls.iter().copied().filter(|l| l.meet_count(line.points) == 1).collect()
    }
}

/// The classes to extend, one entry per line to add.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SearchStrategy(pub Vec<usize>);

impl SearchStrategy {
    /// Round-robin over `(class, count)` pairs until every count is used up.
    pub fn alternate(parts: &[(usize, usize)]) -> Self {
        let mut left: Vec<(usize, usize)> = parts.to_vec();
        let mut out = Vec::new();
        while left.iter().any(|&(_, k)| k > 0) {
            for (c, k) in left.iter_mut() {
                if *k > 0 {
                    out.push(*c);
                    *k -= 1;
                }
            }
        }
        SearchStrategy(out)
    }

    /// Each class in turn, to completion.
    pub fn sequential(parts: &[(usize, usize)]) -> Self {
        SearchStrategy(
            parts
                .iter()
                .flat_map(|&(c, k)| std::iter::repeat_n(c, k))
                .collect(),
        )
    }

    pub fn then(mut self, rest: SearchStrategy) -> Self {
        self.0.extend(rest.0);
        self
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Node and output counts of a search.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes: u64,
    pub outputs: u64,
    /// The node limit stopped the search before it finished.
    pub truncated: bool,
}

impl std::ops::AddAssign for SearchStats {
    fn add_assign(&mut self, o: Self) {
        self.nodes += o.nodes;
        self.outputs += o.outputs;
        self.truncated |= o.truncated;
    }
}

/// Runs the line-adding backtrack from `p`, calling `sink` on every partial
/// net reached after all steps of `strategy`.
pub fn add_line_search(
    p: &mut PartialNet,
    cand: &CandidateSets,
    strategy: &SearchStrategy,
    sink: &mut dyn FnMut(&PartialNet),
) -> SearchStats {
    add_line_search_limited(p, cand, strategy, u64::MAX, sink)
}

/// [`add_line_search`] that gives up after visiting `limit` nodes.
pub fn add_line_search_limited(
    p: &mut PartialNet,
    cand: &CandidateSets,
    strategy: &SearchStrategy,
    limit: u64,
    sink: &mut dyn FnMut(&PartialNet),
) -> SearchStats {
    let s = &strategy.0;
    // classes still needed after each step; others are not filtered
    let mut needed = vec![0u64; s.len() + 1];
    for i in (0..s.len()).rev() {
        needed[i] = needed[i + 1] | 1 << s[i];
    }
    let mut stats = SearchStats::default();
    let lines: Vec<Vec<PointSet>> = cand
        .lines
        .iter()
        .enumerate()
        .map(|(c, ls)| if needed[0] >> c & 1 == 1 { ls.clone() } else { Vec::new() })
        .collect();
    add_line(0, p, &lines, &cand.cover, s, &needed, limit, sink, &mut stats);
    stats
}

#[allow(clippy::too_many_arguments)]
fn add_line(
    i: usize,
    p: &mut PartialNet,
    cand: &[Vec<PointSet>],
    cover: &[PointSet],
    s: &[usize],
    needed: &[u64],
    limit: u64,
    sink: &mut dyn FnMut(&PartialNet),
    stats: &mut SearchStats,
) {
    if stats.nodes >= limit {
        stats.truncated = true;
        return;
    }
    stats.nodes += 1;
    if i == s.len() {
        stats.outputs += 1;
        sink(p);
        return;
    }
    let j = s[i];
    let uncovered = cover[j].minus(p.covered(j));
    let Some(point) = branch_point(&cand[j], uncovered) else {
        return;
    };
    let through: Vec<PointSet> = cand[j].iter().copied().filter(|l| l.contains(point)).collect();
    for l in through {
        let line = Line::new(j, l);
        let next: Vec<Vec<PointSet>> = cand
            .iter()
            .enumerate()
            .map(|(c, ls)| {
                if needed[i + 1] >> c & 1 == 1 {
                    filter_class(ls, c, line)
                } else {
                    Vec::new()
                }
            })
            .collect();
        p.push(line);
        // every point still to be covered must lie on some remaining line
        let alive = next.iter().enumerate().all(|(c, ls)| {
            needed[i + 1] >> c & 1 == 0 || {
                let reach = ls.iter().fold(PointSet::EMPTY, |u, &l| u.join(l));
                cover[c].minus(p.covered(c)).minus(reach).is_empty()
            }
        });
        if alive && !stats.truncated {
            add_line(i + 1, p, &next, cover, s, needed, limit, sink, stats);
        }
        p.pop(j);
    }
}

/// The uncovered point on the fewest lines, or `None` if some uncovered
/// point lies on no line.
fn branch_point(lines: &[PointSet], uncovered: PointSet) -> Option<usize> {
    let mut counts = [0u32; 128];
    for l in lines {
        for pt in l.iter() {
            counts[pt] += 1;
        }
    }
    let best = uncovered.iter().min_by_key(|&pt| counts[pt])?;
    (counts[best] > 0).then_some(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netcore::validate_partial_net;
    use crate::templates::tests::{FIG1, FIG2};

    fn factorial(n: usize) -> usize {
        (1..=n).product()
    }

    #[test]
    fn trivial_template_admits_every_permutation() {
        for n in 1..=6 {
            let t = Template::trivial(n, 1).unwrap();
            assert_eq!(candidate_lines(&t, 2).len(), factorial(n));
        }
    }

    /// Brute force over permutations `r -> σ(r)`: (lines one color in
    /// square `s`, those also meeting the ones of every other square `λ` times).
    fn brute_candidates(t: &Template, s: usize) -> (usize, usize) {
        struct Walk<'a> {
            t: &'a Template,
            s: usize,
            used: Vec<bool>,
            hits: Vec<usize>,
            counts: (usize, usize),
        }
        impl Walk<'_> {
            fn go(&mut self, r: usize, color: Option<bool>) {
                let (n, m) = (self.t.order(), self.t.square_count());
                if r == n {
                    self.counts.0 += 1;
                    if (0..m).all(|o| o == self.s || self.hits[o] == self.t.lambdas()[o + 2]) {
                        self.counts.1 += 1;
                    }
                    return;
                }
                for c in 0..n {
                    let here = self.t.bit(self.s, r, c);
                    if self.used[c] || color.is_some_and(|k| k != here) {
                        continue;
                    }
                    self.used[c] = true;
                    for o in 0..m {
                        self.hits[o] += self.t.bit(o, r, c) as usize;
                    }
                    self.go(r + 1, Some(here));
                    for o in 0..m {
                        self.hits[o] -= self.t.bit(o, r, c) as usize;
                    }
                    self.used[c] = false;
                }
            }
        }
        let mut w = Walk {
            t,
            s,
            used: vec![false; t.order()],
            hits: vec![0; t.square_count()],
            counts: (0, 0),
        };
        w.go(0, None);
        w.counts
    }

    #[test]
    fn candidate_counts_for_example_templates() {
        for (text, classes) in [(FIG1, 2..4), (FIG2, 2..5)] {
            let t: Template = text.parse().unwrap();
            for c in classes {
                let (mono, bal) = brute_candidates(&t, c - 2);
                assert_eq!(candidate_lines_with(&t, c, CandidateRule::Monochromatic).len(), mono);
                assert_eq!(candidate_lines(&t, c).len(), bal);
            }
        }
    }

    #[test]
    fn strategies_interleave_and_concatenate() {
        assert_eq!(SearchStrategy::alternate(&[(2, 2), (3, 3)]).0, vec![2, 3, 2, 3, 3]);
        assert_eq!(SearchStrategy::sequential(&[(2, 2), (3, 1)]).0, vec![2, 2, 3]);
    }

    /// Orthogonal ordered pairs of line partitions of the order-4 grid, by brute force.
    fn orthogonal_partition_pairs(n: usize) -> u64 {
        let perms = crate::perm::all_permutations(n);
        let lines: Vec<PointSet> = perms
            .iter()
            .map(|p| PointSet::from_points((0..n).map(|r| r * n + p[r])))
            .collect();
        let mut parts: Vec<Vec<PointSet>> = Vec::new();
        fn rec(lines: &[PointSet], from: usize, cur: &mut Vec<PointSet>, n: usize, parts: &mut Vec<Vec<PointSet>>) {
            if cur.len() == n {
                parts.push(cur.clone());
                return;
            }
            for i in from..lines.len() {
                if cur.iter().all(|l| l.is_disjoint(lines[i])) {
                    cur.push(lines[i]);
                    rec(lines, i + 1, cur, n, parts);
                    cur.pop();
                }
            }
        }
        rec(&lines, 0, &mut Vec::new(), n, &mut parts);
        let mut count = 0;
        for a in &parts {
            for b in &parts {
                if a.iter().all(|x| b.iter().all(|y| x.meet_count(*y) == 1)) {
                    count += 1;
                }
            }
        }
        count
    }

    #[test]
    fn search_counts_orthogonal_pairs() {
        for n in [3, 4, 5] {
            let cand = CandidateSets::unconstrained(n, 4);
            let mut p = PartialNet::trivial(n, 4).unwrap();
            let mut seen = std::collections::HashSet::new();
            let stats = add_line_search(
                &mut p,
                &cand,
                &SearchStrategy::alternate(&[(2, n), (3, n)]),
                &mut |q| {
                    assert!(validate_partial_net(q).is_ok());
                    let mut q = q.clone();
                    q.sort_lines();
                    assert!(seen.insert(q));
                },
            );
            assert_eq!(stats.outputs, orthogonal_partition_pairs(n));
        }
    }
}
