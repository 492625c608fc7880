//! Species (paratopy classes) of MOLS, invariants and catalogues.
//!
//! A list of `k - 2` MOLS is read as an orthogonal array with `k` columns:
//! row, column and one column per square. Two lists belong to the same
//! species when their arrays agree after permuting columns and renaming the
//! symbols of each column, which is isomorphism of the corresponding nets.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::gf2::{
    dimension, incidence_matrix, normalize_type, null_space_basis, nontrivial_relation_basis, solve, span,
    BitVector, RelationType,
};
use crate::netcore::{common_transversals, max_disjoint_transversals, mols_to_net, MolsList, Net};
use crate::perm::all_permutations;
use crate::templates::Template;
use crate::PointSet;

const NONE: u8 = u8::MAX;

/// Hex SHA-256 digest of the canonical species certificate.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpeciesKey(pub String);

impl fmt::Display for SpeciesKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

struct Labels {
    rows: Vec<u8>,
    row_of: Vec<u8>,
    cols: Vec<u8>,
    col_of: Vec<u8>,
    sym_of: Vec<Vec<u8>>,
    sym_next: Vec<u8>,
    visited: Vec<bool>,
}

impl Labels {
    fn new(n: usize, m: usize) -> Self {
        Labels {
            rows: Vec::with_capacity(n),
            row_of: vec![NONE; n],
            cols: Vec::with_capacity(n),
            col_of: vec![NONE; n],
            sym_of: vec![vec![NONE; n]; m],
            sym_next: vec![0; m],
            visited: vec![false; n * n],
        }
    }

    fn clone_state(&self) -> Self {
        Labels {
            rows: self.rows.clone(),
            row_of: self.row_of.clone(),
            cols: self.cols.clone(),
            col_of: self.col_of.clone(),
            sym_of: self.sym_of.clone(),
            sym_next: self.sym_next.clone(),
            visited: self.visited.clone(),
        }
    }

    fn add_row(&mut self, x: usize) {
        if self.row_of[x] == NONE {
            self.row_of[x] = self.rows.len() as u8;
            self.rows.push(x as u8);
        }
    }

    fn add_col(&mut self, y: usize) {
        if self.col_of[y] == NONE {
            self.col_of[y] = self.cols.len() as u8;
            self.cols.push(y as u8);
        }
    }
}

/// One conjugate of the array: `sq[t][x * n + y]` is the symbol of column
/// `t + 2` on the run with row `x` and column `y`.
struct Conjugate {
    n: usize,
    sq: Vec<Vec<u8>>,
}

impl Conjugate {
    /// Labels rows, columns and symbols outward from the anchor cell
    /// `(x0, y0)`. Symbols of the first square name new columns through row
    /// `x0` and new rows through column `y0`. When this closes on a proper
    /// subsquare every unlabeled column is tried as the next anchor.
    fn search(&self, x0: usize, y0: usize, pos_in_row: &[u8], pos_in_col: &[u8], best: &mut Option<Vec<u8>>) {
        let mut lab = Labels::new(self.n, self.sq.len());
        lab.add_row(x0);
        lab.add_col(y0);
        self.extend(lab, pos_in_row, pos_in_col, best);
    }

    fn extend(&self, mut lab: Labels, pos_in_row: &[u8], pos_in_col: &[u8], best: &mut Option<Vec<u8>>) {
        let n = self.n;
        loop {
            let (nr, nc) = (lab.rows.len(), lab.cols.len());
            let mut progress = false;
            for a in 0..nr {
                for b in 0..nc {
                    if lab.visited[a * n + b] {
                        continue;
                    }
                    lab.visited[a * n + b] = true;
                    progress = true;
                    let cell = lab.rows[a] as usize * n + lab.cols[b] as usize;
                    for t in 0..self.sq.len() {
                        let v = self.sq[t][cell] as usize;
                        if lab.sym_of[t][v] == NONE {
                            lab.sym_of[t][v] = lab.sym_next[t];
                            lab.sym_next[t] += 1;
                            if t == 0 {
                                lab.add_col(pos_in_row[v] as usize);
                                lab.add_row(pos_in_col[v] as usize);
                            }
                        }
                    }
                }
            }
            if !progress {
                break;
            }
        }
        if lab.cols.len() < n {
            for y in 0..n {
                if lab.col_of[y] == NONE {
                    let mut next = lab.clone_state();
                    next.add_col(y);
                    self.extend(next, pos_in_row, pos_in_col, best);
                }
            }
            return;
        }
        self.emit(&lab, best);
    }

    fn emit(&self, lab: &Labels, best: &mut Option<Vec<u8>>) {
        let n = self.n;
        let m = self.sq.len();
        let mut cert = Vec::with_capacity(n * n * m);
        let mut tight = best.is_some();
        for &x in &lab.rows {
            for &y in &lab.cols {
                for t in 0..m {
                    let v = lab.sym_of[t][self.sq[t][x as usize * n + y as usize] as usize];
                    if tight {
                        let b = best.as_ref().expect("checked")[cert.len()];
                        if v > b {
                            return;
                        }
                        if v < b {
                            tight = false;
                        }
                    }
                    cert.push(v);
                }
            }
        }
        if best.as_ref().is_none_or(|b| cert < *b) {
            *best = Some(cert);
        }
    }
}

/// Canonical certificate of the species of `m`: the least labeled array over
/// all conjugates and anchors.
pub fn species_cert(m: &MolsList) -> Vec<u8> {
    let n = m.order();
    let k = m.len() + 2;
    let runs: Vec<Vec<u8>> = (0..n * n)
        .map(|p| {
            let (r, c) = (p / n, p % n);
            let mut run = vec![r as u8, c as u8];
            run.extend((0..m.len()).map(|s| m.get(s, r, c)));
            run
        })
        .collect();
    let mut best = None;
    for order in all_permutations(k) {
        let mut grid = vec![0usize; n * n];
        for (p, run) in runs.iter().enumerate() {
            grid[run[order[0]] as usize * n + run[order[1]] as usize] = p;
        }
        let sq: Vec<Vec<u8>> = (2..k)
            .map(|t| grid.iter().map(|&p| runs[p][order[t]]).collect())
            .collect();
        let conj = Conjugate { n, sq };
        for x0 in 0..n {
            let mut pos_in_row = vec![0u8; n];
            for y in 0..n {
                pos_in_row[conj.sq[0][x0 * n + y] as usize] = y as u8;
            }
            for y0 in 0..n {
                let mut pos_in_col = vec![0u8; n];
                for x in 0..n {
                    pos_in_col[conj.sq[0][x * n + y0] as usize] = x as u8;
                }
                conj.search(x0, y0, &pos_in_row, &pos_in_col, &mut best);
            }
        }
    }
    let mut out = vec![n as u8, k as u8];
    out.extend(best.unwrap_or_default());
    out
}

pub fn species_key(m: &MolsList) -> SpeciesKey {
    SpeciesKey(hex::encode(Sha256::digest(species_cert(m))))
}

/// Species-invariant data used to describe and prefilter catalogues.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct InvariantProfile {
    pub dimension: usize,
    pub transversals: usize,
    pub max_disjoint: usize,
    /// Normalized types of the non-trivial relations, without repeats.
    pub relation_types: Vec<RelationType>,
}

/// Cap on the number of relations whose types are listed.
const TYPE_CAP: u64 = 1 << 12;

pub fn invariant_profile(m: &MolsList) -> Result<InvariantProfile> {
    let net = mols_to_net(m)?;
    let ts = common_transversals(m);
    let (max_disjoint, _) = max_disjoint_transversals(&ts);
    Ok(InvariantProfile {
        dimension: dimension(&net),
        transversals: ts.len(),
        max_disjoint,
        relation_types: relation_types(&net),
    })
}

/// Normalized types of all non-trivial relations (up to a cap).
pub fn relation_types(net: &Net) -> Vec<RelationType> {
    let n = net.order();
    let k = net.class_count();
    let basis = nontrivial_relation_basis(net);
    let mut types = BTreeSet::new();
    for v in span(&basis, n * k, TYPE_CAP).skip(1) {
        let weights = (0..k).map(|c| (c * n..(c + 1) * n).filter(|&i| v.get(i)).count()).collect();
        types.insert(normalize_type(&RelationType::new(weights, false), n));
    }
    types.into_iter().collect()
}

impl InvariantProfile {
    fn types_text(&self) -> String {
        if self.relation_types.is_empty() {
            return "-".into();
        }
        self.relation_types
            .iter()
            .map(|t| t.weights.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(","))
            .collect::<Vec<_>>()
            .join(";")
    }

    fn parse_types(s: &str) -> Option<Vec<RelationType>> {
        if s == "-" {
            return Some(Vec::new());
        }
        s.split(';')
            .map(|t| {
                let w: Option<Vec<usize>> = t.split(',').map(|x| x.parse().ok()).collect();
                w.map(|w| RelationType::new(w, false))
            })
            .collect()
    }
}

/// One species: key, invariants and a representative.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpeciesEntry {
    pub key: SpeciesKey,
    pub profile: InvariantProfile,
    pub rep: MolsList,
}

/// Species keyed by [`SpeciesKey`]; iteration is in key order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SpeciesCatalogue {
    entries: BTreeMap<SpeciesKey, SpeciesEntry>,
}

impl SpeciesCatalogue {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, key: &SpeciesKey) -> bool {
        self.entries.contains_key(key)
    }

    pub fn get(&self, key: &SpeciesKey) -> Option<&SpeciesEntry> {
        self.entries.get(key)
    }

    pub fn entries(&self) -> impl Iterator<Item = &SpeciesEntry> {
        self.entries.values()
    }

    pub fn keys(&self) -> impl Iterator<Item = &SpeciesKey> {
        self.entries.keys()
    }

    /// Adds `m` unless its species is present; returns the key and whether it was new.
    pub fn insert(&mut self, m: &MolsList) -> Result<(SpeciesKey, bool)> {
        let key = species_key(m);
        if self.entries.contains_key(&key) {
            return Ok((key, false));
        }
        let entry = SpeciesEntry {
            key: key.clone(),
            profile: invariant_profile(m)?,
            rep: m.normalize_symbols(),
        };
        self.entries.insert(key.clone(), entry);
        Ok((key, true))
    }

    /// Adds an entry, keeping the present one for a known key.
    pub fn insert_entry(&mut self, e: SpeciesEntry) -> bool {
        if self.entries.contains_key(&e.key) {
            return false;
        }
        self.entries.insert(e.key.clone(), e);
        true
    }

    /// Union with `other`; for shared keys the representative with the
    /// smaller text wins, so merging is order-independent.
    pub fn merge(&mut self, other: &SpeciesCatalogue) {
        for (k, e) in &other.entries {
            match self.entries.get_mut(k) {
                Some(mine) => {
                    if e.rep.to_text() < mine.rep.to_text() {
                        *mine = e.clone();
                    }
                }
                None => {
                    self.entries.insert(k.clone(), e.clone());
                }
            }
        }
    }

    /// Writes `keys.txt`, `reps/<key>.mols` and `invariants.tsv` under `dir`.
    pub fn write_dir(&self, dir: &Path) -> Result<()> {
        let reps = dir.join("reps");
        fs::create_dir_all(&reps).map_err(|e| Error::io(&reps, e))?;
        let mut keys = String::new();
        let mut tsv = String::from("key\tdimension\ttransversals\tmax_disjoint\trelation_types\n");
        for e in self.entries.values() {
            keys.push_str(&e.key.0);
            keys.push('\n');
            tsv.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\n",
                e.key,
                e.profile.dimension,
                e.profile.transversals,
                e.profile.max_disjoint,
                e.profile.types_text()
            ));
            let path = reps.join(format!("{}.mols", e.key));
            fs::write(&path, e.rep.to_text()).map_err(|err| Error::io(&path, err))?;
        }
        let path = dir.join("keys.txt");
        fs::write(&path, keys).map_err(|e| Error::io(&path, e))?;
        let path = dir.join("invariants.tsv");
        fs::write(&path, tsv).map_err(|e| Error::io(&path, e))?;
        Ok(())
    }

    /// Reads a directory written by [`write_dir`](Self::write_dir).
    pub fn read_dir(dir: &Path) -> Result<Self> {
        let path = dir.join("invariants.tsv");
        let tsv = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        let mut cat = SpeciesCatalogue::new();
        for (i, line) in tsv.lines().enumerate().skip(1) {
            if line.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split('\t').collect();
            let bad = || Error::parse(i + 1, 1, "malformed invariants row");
            if f.len() != 5 {
                return Err(bad());
            }
            let num = |s: &str| s.parse::<usize>().map_err(|_| bad());
            let profile = InvariantProfile {
                dimension: num(f[1])?,
                transversals: num(f[2])?,
                max_disjoint: num(f[3])?,
                relation_types: InvariantProfile::parse_types(f[4]).ok_or_else(bad)?,
            };
            let rp = dir.join("reps").join(format!("{}.mols", f[0]));
            let rep: MolsList = fs::read_to_string(&rp).map_err(|e| Error::io(&rp, e))?.parse()?;
            cat.insert_entry(SpeciesEntry {
                key: SpeciesKey(f[0].to_string()),
                profile,
                rep,
            });
        }
        Ok(cat)
    }
}

/// One representative per species of the input.
pub fn screen<'a, I: IntoIterator<Item = &'a MolsList>>(items: I) -> Result<SpeciesCatalogue> {
    let mut cat = SpeciesCatalogue::new();
    let mut batch = SpeciesCatalogue::new();
    for m in items {
        batch.insert(m)?;
    }
    // merging picks representatives independently of input order
    cat.merge(&batch);
    Ok(cat)
}

/// Grouping used by [`tabulate`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TabulateBy {
    /// Key `[dimension]`.
    Dimension,
    /// Key `[max_disjoint, transversals]`.
    Transversals,
}

pub fn tabulate(cat: &SpeciesCatalogue, by: TabulateBy) -> BTreeMap<Vec<usize>, usize> {
    let mut out = BTreeMap::new();
    for e in cat.entries() {
        let key = match by {
            TabulateBy::Dimension => vec![e.profile.dimension],
            TabulateBy::Transversals => vec![e.profile.max_disjoint, e.profile.transversals],
        };
        *out.entry(key).or_insert(0) += 1;
    }
    out
}

/// Templates of odd relations on the partial 5-net formed by `m` and two
/// disjoint common transversals used as a fifth class.
///
/// Every choice of transversal pair and every odd relation of the resulting
/// structure that contains both transversals and has the class weights
/// `lambdas` (transversal class last) gives a template.
pub fn transversal_odd_templates(m: &MolsList, lambdas: &[usize]) -> Result<Vec<Template>> {
    let net = mols_to_net(m)?;
    let n = net.order();
    let k = net.class_count();
    if lambdas.len() != k + 1 || lambdas[k] != 2 {
        return Err(Error::UnsupportedType(format!("{lambdas:?}")));
    }
    let a = incidence_matrix(&net);
    let nulls = null_space_basis(&a);
    let ts = common_transversals(m);
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for i in 0..ts.len() {
        for j in i + 1..ts.len() {
            let (ti, tj) = (ts[i].0, ts[j].0);
            if !ti.is_disjoint(tj) {
                continue;
            }
            let extra = ti.join(tj);
            let rhs = BitVector::from_indices(n * n, PointSet::full(n * n).minus(extra).iter());
            let Some(x0) = solve(&a, &rhs) else {
                continue;
            };
            for d in span(&nulls, n * k, TYPE_CAP) {
                let mut x = x0.clone();
                x.xor_assign(&d);
                let weights: Vec<usize> =
                    (0..k).map(|c| (c * n..(c + 1) * n).filter(|&l| x.get(l)).count()).collect();
                if weights[..] != lambdas[..k] {
                    continue;
                }
                let t = template_of_lines(&net, &x, extra, lambdas)?;
                if seen.insert(crate::templates::canonical_form(&t)) {
                    out.push(t);
                }
            }
        }
    }
    Ok(out)
}

fn template_of_lines(net: &Net, x: &BitVector, extra: PointSet, lambdas: &[usize]) -> Result<Template> {
    let n = net.order();
    let k = net.class_count();
    let order_of = |c: usize| -> Vec<usize> {
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by_key(|&i| !x.get(c * n + i));
        idx
    };
    let rows = order_of(0);
    let cols = order_of(1);
    let mut cells = vec![0u8; n * n];
    for (i, &ri) in rows.iter().enumerate() {
        for (j, &cj) in cols.iter().enumerate() {
            let p = net.class(0)[ri].meet(net.class(1)[cj]).first().expect("orthogonal lines meet");
            let mut v = 0u8;
            for c in 2..k {
                if x.get(c * n + net.line_through(c, p)) {
                    v |= 1 << (c - 2);
                }
            }
            if extra.contains(p) {
                v |= 1 << (k - 2);
            }
            cells[i * n + j] = v;
        }
    }
    Template::new(n, lambdas.to_vec(), cells)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const PAIR: &str = include_str!("../../../data/examples/pair_4x4_t7_d5.mols");
    const PAIR_19: &str = include_str!("../../../data/examples/pair_4x4_t19_d5.mols");
    const ODD_4: &str = include_str!("../../../data/examples/pair_odd_t4_d4.mols");
    const ODD_13: &str = include_str!("../../../data/examples/pair_odd_t13_d3.mols");

    fn shuffled(m: &MolsList, rng: &mut ChaCha8Rng) -> MolsList {
        let n = m.order();
        let perm = |rng: &mut ChaCha8Rng| {
            let mut p: Vec<usize> = (0..n).collect();
            p.shuffle(rng);
            p
        };
        let (rp, cp) = (perm(rng), perm(rng));
        let sp: Vec<Vec<usize>> = (0..m.len()).map(|_| perm(rng)).collect();
        // conjugate: shuffle the roles of all columns of the array
        let k = m.len() + 2;
        let mut roles: Vec<usize> = (0..k).collect();
        roles.shuffle(rng);
        let runs: Vec<Vec<usize>> = (0..n * n)
            .map(|p| {
                let (r, c) = (p / n, p % n);
                let mut run = vec![rp[r], cp[c]];
                run.extend((0..m.len()).map(|s| sp[s][m.get(s, r, c) as usize]));
                roles.iter().map(|&i| run[i]).collect()
            })
            .collect();
        let mut squares = vec![vec![0u8; n * n]; m.len()];
        for run in &runs {
            for s in 0..m.len() {
                squares[s][run[0] * n + run[1]] = run[s + 2] as u8;
            }
        }
        MolsList::new(n, squares).unwrap()
    }

    #[test]
    fn key_is_constant_on_paratopes() {
        let m: MolsList = PAIR.parse().unwrap();
        let key = species_key(&m);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            assert_eq!(species_key(&shuffled(&m, &mut rng)), key);
        }
    }

    #[test]
    fn screen_collapses_paratopes() {
        let m: MolsList = PAIR.parse().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let items: Vec<MolsList> = (0..10).map(|_| shuffled(&m, &mut rng)).collect();
        assert_eq!(screen(&items).unwrap().len(), 1);
    }

    #[test]
    fn example_pairs_have_distinct_keys() {
        let keys: BTreeSet<SpeciesKey> = [PAIR, PAIR_19, ODD_4, ODD_13]
            .iter()
            .map(|t| species_key(&t.parse().unwrap()))
            .collect();
        assert_eq!(keys.len(), 4);
    }

    #[test]
    fn odd_pair_refines_the_example_template() {
        let m: MolsList = ODD_4.parse().unwrap();
        let fig2: Template = crate::templates::tests::FIG2.parse().unwrap();
        let found = transversal_odd_templates(&m, &[4, 4, 2, 2, 2]).unwrap();
        assert!(found.iter().any(|t| crate::templates::are_isomorphic(t, &fig2)));
    }

    #[test]
    fn catalogue_round_trips_through_a_directory() {
        let items: Vec<MolsList> = [PAIR, ODD_4].iter().map(|t| t.parse().unwrap()).collect();
        let cat = screen(&items).unwrap();
        let dir = std::env::temp_dir().join(format!("netrel-cat-{}", std::process::id()));
        cat.write_dir(&dir).unwrap();
        let back = SpeciesCatalogue::read_dir(&dir).unwrap();
        std::fs::remove_dir_all(&dir).unwrap();
        assert_eq!(back, cat);
        let mut twice = cat.clone();
        twice.merge(&cat);
        assert_eq!(twice, cat);
    }
}
