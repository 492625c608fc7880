//! Orbits of candidate lines under template automorphisms, symmetry-broken
//! search and the refinement driver.

use std::collections::HashMap;
use std::ops::Range;

use super::{add_line_search_limited, candidate_lines_colored, candidate_lines_with, CandidateRule, CandidateSets, SearchStats, SearchStrategy};
use crate::classify::SpeciesCatalogue;
use crate::error::Result;
use crate::netcore::{net_to_mols, Line, MolsList, Net, PartialNet};
use crate::templates::{automorphism_group, SymmetryClass, Template, TemplateIso};
use crate::PointSet;

/// Image of a line of `class` under a template isomorphism.
pub fn line_image(iso: &TemplateIso, n: usize, class: usize, points: PointSet) -> Line {
    let p = &iso.0;
    let tr = iso.transposes(n);
    let image = PointSet::from_points(points.iter().map(|pt| {
        let (r, c) = (pt / n, pt % n);
        let (a, b) = (p.apply(r), p.apply(n + c));
        if tr {
            b * n + a - n
        } else {
            a * n + b - n
        }
    }));
    let class = match class {
        0 | 1 if tr => 1 - class,
        0 | 1 => class,
        s => p.apply(2 * n + s - 2) - 2 * n + 2,
    };
    Line::new(class, image)
}

/// An orbit of candidate lines meeting the non-relational lines of class 2.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Orbit {
    /// Least class-2 line of the orbit.
    pub leader: PointSet,
    /// Every candidate line of the orbit, sorted.
    pub members: Vec<Line>,
}

/// Orbits of the candidate lines under the group generated by `gens`,
/// keeping those that contain a non-relational class-2 line (any class-2
/// line when the first square is all ones), ordered by size then leader.
pub fn compute_orbits(t: &Template, cand: &CandidateSets, gens: &[TemplateIso]) -> Vec<Orbit> {
    let n = t.order();
    let mut index: HashMap<Line, usize> = HashMap::new();
    let mut all: Vec<Line> = Vec::new();
    for (c, ls) in cand.lines.iter().enumerate() {
        for &l in ls {
            let line = Line::new(c, l);
            index.insert(line, all.len());
            all.push(line);
        }
    }
    let mut parent: Vec<usize> = (0..all.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for g in gens {
        for (i, line) in all.iter().enumerate() {
            let img = line_image(g, n, line.class, line.points);
            // the candidate pools are invariant, so images outside them do not occur
            if let Some(&j) = index.get(&img) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let all_ones = t.lambdas()[2] == n;
    let mut groups: HashMap<usize, Vec<Line>> = HashMap::new();
    for i in 0..all.len() {
        let root = find(&mut parent, i);
        groups.entry(root).or_default().push(all[i]);
    }
    let mut orbits: Vec<Orbit> = groups
        .into_values()
        .filter_map(|mut members| {
            members.sort();
            let leader = members
                .iter()
                .filter(|l| l.class == 2 && (all_ones || !is_relational(t, l)))
                .map(|l| l.points)
                .min()?;
            Some(Orbit { leader, members })
        })
        .collect();
    orbits.sort_by_key(|a| (a.members.len(), a.leader));
    orbits
}

fn is_relational(t: &Template, l: &Line) -> bool {
    let n = t.order();
    let p = l.points.first().expect("lines are nonempty");
    t.bit(l.class - 2, p / n, p % n)
}

/// Algorithm for picking the search strategy of each run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StrategyChoice {
    Alternate,
    Sequential,
    /// Alternate while the two largest remaining classes differ by at most
    /// this factor, else finish them one at a time.
    Auto { ratio: f64 },
}

impl Default for StrategyChoice {
    fn default() -> Self {
        StrategyChoice::Auto { ratio: 2.0 }
    }
}

/// Builds `prefix` followed by the `(class, count)` parts, interleaved or
/// in turn according to `choice` and the remaining candidate counts.
pub fn choose_strategy(
    symmetry: SymmetryClass,
    cand: &CandidateSets,
    prefix: SearchStrategy,
    parts: &[(usize, usize)],
    choice: StrategyChoice,
) -> SearchStrategy {
    let alternate = match choice {
        StrategyChoice::Alternate => true,
        StrategyChoice::Sequential => false,
        StrategyChoice::Auto { ratio } => {
            symmetry == SymmetryClass::S3 || {
                let sizes: Vec<f64> = parts.iter().map(|&(c, _)| cand.class(c).len() as f64).collect();
                let lo = sizes.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = sizes.iter().cloned().fold(0.0, f64::max);
                lo > 0.0 && hi <= ratio * lo
            }
        }
    };
    let rest = if alternate {
        SearchStrategy::alternate(parts)
    } else {
        SearchStrategy::sequential(parts)
    };
    prefix.then(rest)
}

/// A square order for a template: a pair of squares exchanged by an
/// automorphism is moved to the last two positions.
pub fn preferred_square_order(t: &Template) -> Vec<usize> {
    let m = t.square_count();
    let aut = automorphism_group(t);
    match (aut.symmetry_class(), aut.exchanged_pair()) {
        (SymmetryClass::C2, Some((a, b))) if m >= 3 => {
            let mut order: Vec<usize> = (0..m).filter(|&s| s != a && s != b).collect();
            order.extend([a, b]);
            order
        }
        _ => (0..m).collect(),
    }
}

/// Which automorphisms are used to break symmetry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SymmetryMode {
    /// No symmetry breaking: a single unbroken search.
    Off,
    /// Automorphisms fixing every partially refined square. The output then
    /// holds every species of the searched structures.
    Stabilizer,
    /// The whole automorphism group. Sound for nets in which every square is
    /// refined in full, which is all the odd-relation argument needs.
    #[default]
    Full,
}

/// Settings for [`RefinePlan`].
#[derive(Clone, Debug, PartialEq)]
pub struct RefineOptions {
    /// Squares refined to full parallel classes; `None` means all.
    pub complete: Option<usize>,
    pub rule: CandidateRule,
    pub strategy: StrategyChoice,
    pub symmetry: SymmetryMode,
    /// Nodes each call of [`RefinePlan::run_tasks`] may visit; `None` means no limit.
    pub node_limit: Option<u64>,
}

impl Default for RefineOptions {
    fn default() -> Self {
        RefineOptions {
            complete: None,
            rule: CandidateRule::Balanced,
            strategy: StrategyChoice::default(),
            symmetry: SymmetryMode::Full,
            node_limit: None,
        }
    }
}

/// A refinement run split into independent tasks, one per orbit.
///
/// Squares beyond the first `complete` get only their relational lines,
/// drawn from the relational candidates and placed before the other classes.
#[derive(Clone, Debug)]
pub struct RefinePlan {
    pub template: Template,
    pub complete: usize,
    pub cand: CandidateSets,
    /// Empty when symmetry breaking is off or the group is trivial.
    pub orbits: Vec<Orbit>,
    pub symmetry: SymmetryClass,
    pub strategy: StrategyChoice,
    pub node_limit: Option<u64>,
}

impl RefinePlan {
    pub fn new(t: &Template, opts: &RefineOptions) -> Self {
        let n = t.order();
        let m = t.square_count();
        let complete = opts.complete.unwrap_or(m).min(m);
        let mut lines = vec![Vec::new(), Vec::new()];
        for c in 2..2 + m {
            if c < 2 + complete {
                lines.push(candidate_lines_with(t, c, opts.rule));
            } else {
                lines.push(candidate_lines_colored(t, c, opts.rule, true));
            }
        }
        let mut cand = CandidateSets::new(n, lines);
        for s in complete..m {
            cand.cover[s + 2] = t.ones(s);
        }
        let aut = automorphism_group(t);
        let partial: Vec<usize> = (complete..m).collect();
        let gens = match opts.symmetry {
            SymmetryMode::Off => Vec::new(),
            SymmetryMode::Stabilizer => aut.generators_fixing(n, &partial),
            SymmetryMode::Full => aut.generators.clone(),
        };
        let orbits = if gens.is_empty() || complete == 0 {
            Vec::new()
        } else {
            compute_orbits(t, &cand, &gens)
        };
        RefinePlan {
            template: t.clone(),
            complete,
            cand,
            orbits,
            symmetry: aut.symmetry_class(),
            strategy: opts.strategy,
            node_limit: opts.node_limit,
        }
    }

    /// Number of independent tasks.
    pub fn task_count(&self) -> usize {
        self.orbits.len().max(1)
    }

    fn prefix(&self) -> SearchStrategy {
        let t = &self.template;
        let parts: Vec<(usize, usize)> = (2 + self.complete..t.k()).map(|c| (c, t.lambdas()[c])).collect();
        SearchStrategy::sequential(&parts)
    }

    fn parts(&self, leader_placed: bool) -> Vec<(usize, usize)> {
        let n = self.template.order();
        (2..2 + self.complete)
            .map(|c| (c, if c == 2 && leader_placed { n - 1 } else { n }))
            .collect()
    }

    /// Runs the tasks in `range`; `sink` receives the task index with each
    /// structure found.
    pub fn run_tasks(&self, range: Range<usize>, sink: &mut dyn FnMut(usize, &PartialNet)) -> SearchStats {
        let t = &self.template;
        let mut p = PartialNet::trivial(t.order(), t.k()).expect("supported order");
        let limit = self.node_limit.unwrap_or(u64::MAX);
        if self.orbits.is_empty() {
            if range.is_empty() {
                return SearchStats::default();
            }
            assert!(range == (0..1), "an unbroken run has one task");
            let s = choose_strategy(self.symmetry, &self.cand, self.prefix(), &self.parts(false), self.strategy);
            return add_line_search_limited(&mut p, &self.cand, &s, limit, &mut |net| sink(0, net));
        }
        let mut choose = |c: &CandidateSets| choose_strategy(self.symmetry, c, self.prefix(), &self.parts(true), self.strategy);
        sym_break_search(&mut p, &self.cand, &self.orbits, range, limit, &mut choose, sink)
    }

    /// Runs every task in order.
    pub fn run(&self, sink: &mut dyn FnMut(&PartialNet)) -> SearchStats {
        self.run_tasks(0..self.task_count(), &mut |_, p| sink(p))
    }

    /// The MOLS given by rows, columns and the completely refined classes.
    pub fn mols_of(&self, p: &PartialNet) -> Result<MolsList> {
        let classes = p.classes()[..2 + self.complete].to_vec();
        let net = Net::from_partial(PartialNet::from_classes(p.order(), classes)?)?;
        net_to_mols(&net, 0, 1)
    }
}

/// Symmetry-broken search over the orbits in `range`.
///
/// For orbit `i` the lines of earlier orbits are dropped from every class,
/// the leader is placed in class 2, and the remaining candidates are
/// filtered against it before [`add_line_search`] runs with the strategy
/// returned by `choose`. `sink` receives the orbit index with each output.
/// At most `limit` nodes are visited over the whole range.
pub fn sym_break_search(
    p: &mut PartialNet,
    cand: &CandidateSets,
    orbits: &[Orbit],
    range: Range<usize>,
    limit: u64,
    choose: &mut dyn FnMut(&CandidateSets) -> SearchStrategy,
    sink: &mut dyn FnMut(usize, &PartialNet),
) -> SearchStats {
    let mut rank: HashMap<Line, usize> = HashMap::new();
    for (i, o) in orbits.iter().enumerate() {
        for &l in &o.members {
            rank.insert(l, i);
        }
    }
    // orbit index of each candidate, usize::MAX outside every orbit
    let ranks: Vec<Vec<usize>> = cand
        .lines
        .iter()
        .enumerate()
        .map(|(c, ls)| ls.iter().map(|&l| rank.get(&Line::new(c, l)).copied().unwrap_or(usize::MAX)).collect())
        .collect();
    let mut stats = SearchStats::default();
    for i in range {
        let lines = cand
            .lines
            .iter()
            .zip(&ranks)
            .map(|(ls, rs)| ls.iter().zip(rs).filter(|&(_, &r)| r >= i).map(|(&l, _)| l).collect())
            .collect();
        let leader = Line::new(2, orbits[i].leader);
        let reduced = CandidateSets {
            n: cand.n,
            lines,
            cover: cand.cover.clone(),
        }
        .filter_against(leader);
        let strategy = choose(&reduced);
        p.push(leader);
        stats += add_line_search_limited(p, &reduced, &strategy, limit - stats.nodes, &mut |net| sink(i, net));
        p.pop(2);
        if stats.truncated {
            break;
        }
    }
    stats
}

/// All refining nets of `t`, one per species of the completely refined part.
pub fn refine_template(t: &Template, opts: &RefineOptions) -> Result<SpeciesCatalogue> {
    let plan = RefinePlan::new(t, opts);
    let mut cat = SpeciesCatalogue::new();
    let mut err = None;
    plan.run(&mut |p| {
        if err.is_none() {
            if let Err(e) = plan.mols_of(p).and_then(|m| cat.insert(&m)) {
                err = Some(e);
            }
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(cat),
    }
}

/// Raw outputs of the plan for `t`, without isomorph rejection.
pub fn refine_nets(t: &Template, opts: &RefineOptions) -> Vec<PartialNet> {
    let plan = RefinePlan::new(t, opts);
    let mut out = Vec::new();
    plan.run(&mut |p| out.push(p.clone()));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::{nontrivial_relation_basis, Relation};
    use crate::netcore::{mols_to_net, validate_partial_net};
    use crate::templates::tests::{FIG1, FIG2};
    use crate::templates::{table2_entries, template_from_encoding, template_of_net};
    use std::collections::BTreeSet;

    #[test]
    fn candidate_pools_are_invariant_under_automorphisms() {
        let t: Template = FIG2.parse().unwrap();
        let n = t.order();
        let cand = CandidateSets::of_template(&t);
        let pool: std::collections::HashSet<Line> = cand
            .lines
            .iter()
            .enumerate()
            .flat_map(|(c, ls)| ls.iter().map(move |&l| Line::new(c, l)))
            .collect();
        for g in &automorphism_group(&t).generators {
            for l in pool.iter().take(2000) {
                assert!(pool.contains(&line_image(g, n, l.class, l.points)));
            }
        }
    }

    #[test]
    fn trivial_group_gives_singleton_orbits() {
        let t: Template = FIG1.parse().unwrap();
        let cand = CandidateSets::of_template(&t);
        let orbits = compute_orbits(&t, &cand, &[]);
        assert!(orbits.iter().all(|o| o.members.len() == 1));
        let nonrel = cand.class(2).iter().filter(|l| !is_relational(&t, &Line::new(2, **l))).count();
        assert_eq!(orbits.len(), nonrel);
    }

    #[test]
    fn orbits_partition_and_leaders_are_least() {
        let t: Template = FIG1.parse().unwrap();
        let cand = CandidateSets::of_template(&t);
        let orbits = compute_orbits(&t, &cand, &automorphism_group(&t).generators);
        let mut seen = BTreeSet::new();
        for o in &orbits {
            for m in &o.members {
                assert!(seen.insert(*m));
            }
            let least = o.members.iter().filter(|l| l.class == 2).map(|l| l.points).min();
            assert_eq!(least, Some(o.leader));
        }
        let sizes: Vec<usize> = orbits.iter().map(|o| o.members.len()).collect();
        assert!(sizes.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn symmetric_orbits_span_every_square() {
        let t = template_from_encoding(table2_entries()[0].encoding).unwrap();
        let cand = CandidateSets::of_template(&t);
        let orbits = compute_orbits(&t, &cand, &automorphism_group(&t).generators);
        let spanning = orbits
            .iter()
            .filter(|o| (2..5).all(|c| o.members.iter().any(|l| l.class == c)))
            .count();
        assert!(spanning * 2 > orbits.len());
    }

    #[test]
    fn strategy_choice_follows_the_ratio() {
        let cand = CandidateSets::new(10, vec![vec![], vec![], vec![PointSet::EMPTY; 100], vec![PointSet::EMPTY; 10]]);
        let parts = [(2, 9), (3, 10)];
        let auto = StrategyChoice::default();
        let seq = choose_strategy(SymmetryClass::None, &cand, SearchStrategy(vec![]), &parts, auto);
        assert_eq!(seq, SearchStrategy::sequential(&parts));
        let alt = choose_strategy(SymmetryClass::S3, &cand, SearchStrategy(vec![4, 4]), &parts, auto);
        assert_eq!(alt, SearchStrategy(vec![4, 4]).then(SearchStrategy::alternate(&parts)));
        let even = CandidateSets::new(10, vec![vec![], vec![], vec![PointSet::EMPTY; 15], vec![PointSet::EMPTY; 10]]);
        let alt = choose_strategy(SymmetryClass::None, &even, SearchStrategy(vec![]), &parts, auto);
        assert_eq!(alt, SearchStrategy::alternate(&parts));
    }

    #[test]
    fn exchanged_pair_moves_to_the_last_squares() {
        for e in table2_entries().iter().filter(|e| e.symmetry == SymmetryClass::C2) {
            let t = template_from_encoding(e.encoding).unwrap();
            let r = t.reorder_squares(&preferred_square_order(&t));
            assert_eq!(automorphism_group(&r).exchanged_pair(), Some((1, 2)), "{}", e.encoding);
        }
    }

    #[test]
    fn relational_lines_through_two_corner_points_share_a_point() {
        let t: Template = FIG1.parse().unwrap();
        let n = t.order();
        let forced = 6 * n + 7;
        for start in [0, n + 1] {
            let through: Vec<PointSet> = candidate_lines_colored(&t, 2, CandidateRule::Balanced, true)
                .into_iter()
                .filter(|l| l.contains(start))
                .collect();
            assert!(!through.is_empty());
            assert!(through.iter().all(|l| l.contains(forced)));
        }
    }

    #[test]
    fn example_4x4_template_has_no_refinement() {
        let t: Template = FIG1.parse().unwrap();
        for symmetry in [SymmetryMode::Full, SymmetryMode::Off] {
            let opts = RefineOptions {
                symmetry,
                ..Default::default()
            };
            assert!(refine_template(&t, &opts).unwrap().is_empty());
        }
    }

    /// The first `count` MOLS of order `q` from the field with `q` elements,
    /// `poly` being the reduction polynomial.
    fn field_mols(q: usize, poly: usize, count: usize) -> MolsList {
        let mul = |mut a: usize, mut b: usize| {
            let mut r = 0;
            while b > 0 {
                if b & 1 == 1 {
                    r ^= a;
                }
                a <<= 1;
                if a & q != 0 {
                    a ^= poly;
                }
                b >>= 1;
            }
            r
        };
        let sq = |m: usize| (0..q * q).map(|p| ((p / q) ^ mul(m, p % q)) as u8).collect();
        MolsList::new(q, (1..=count).map(sq).collect()).unwrap()
    }

    fn species(t: &Template, symmetry: SymmetryMode) -> BTreeSet<crate::classify::SpeciesKey> {
        let opts = RefineOptions {
            symmetry,
            ..Default::default()
        };
        let plan = RefinePlan::new(t, &opts);
        let mut cat = SpeciesCatalogue::new();
        plan.run(&mut |p| {
            assert!(validate_partial_net(p).is_ok());
            cat.insert(&plan.mols_of(p).unwrap()).unwrap();
        });
        cat.keys().cloned().collect()
    }

    #[test]
    fn symmetry_breaking_keeps_every_species_at_order_4() {
        for count in [2, 3] {
            let net = mols_to_net(&field_mols(4, 0b111, count)).unwrap();
            for lines in nontrivial_relation_basis(&net) {
                let t = template_of_net(&net, &Relation { lines }).unwrap();
                let plain = species(&t, SymmetryMode::Off);
                assert!(!plain.is_empty());
                assert_eq!(species(&t, SymmetryMode::Full), plain);
            }
        }
    }
}
