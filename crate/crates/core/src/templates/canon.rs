//! Canonical forms and automorphism groups of templates.
//!
//! Row and column permutations inside the relational and non-relational
//! blocks are handled by an individualization-refinement search on the cell
//! matrix. Transposition and square reordering form a small outer group that
//! is enumerated directly.

use std::cmp::Ordering;

use super::{Template, TemplateIso};
use crate::perm::{all_permutations, group_order, Perm};

/// Canonical labeling of a matrix under row and column permutations that
/// preserve given colorings.
#[derive(Clone, Debug)]
pub struct MatrixCanon {
    /// Entries in canonical row and column order.
    pub cert: Vec<u8>,
    /// Canonical position to original row.
    pub row_order: Vec<usize>,
    pub col_order: Vec<usize>,
    /// Automorphisms on `0..nr + nc` (rows first, then columns).
    pub gens: Vec<Perm>,
    pub order: u128,
}

struct Search<'a> {
    vals: &'a [u8],
    vi: Vec<u8>,
    nv: usize,
    nr: usize,
    nc: usize,
    first: Option<Leaf>,
    best: Option<Leaf>,
    first_path: Vec<usize>,
    gens: Vec<Perm>,
}

struct Leaf {
    cert: Vec<u8>,
    rows: Vec<usize>,
    cols: Vec<usize>,
}

/// Replaces ids by the rank of their signatures; returns the number of classes.
fn rank_by<K: Ord + Clone>(ids: &mut [u32], keys: Vec<K>) -> usize {
    let mut sorted = keys.clone();
    sorted.sort();
    sorted.dedup();
    for (id, k) in ids.iter_mut().zip(&keys) {
        *id = sorted.binary_search(k).expect("present") as u32;
    }
    sorted.len()
}

fn distinct(ids: &[u32]) -> usize {
    let mut v = ids.to_vec();
    v.sort_unstable();
    v.dedup();
    v.len()
}

impl Search<'_> {
    fn refine(&self, rid: &mut [u32], cid: &mut [u32]) {
        let (nr, nc, nv) = (self.nr, self.nc, self.nv);
        let mut rcount = distinct(rid);
        let mut ccount = distinct(cid);
        loop {
            let mut changed = false;
            let keys: Vec<Vec<u16>> = (0..nr)
                .map(|r| {
                    let mut k = vec![0u16; 1 + ccount * nv];
                    k[0] = rid[r] as u16;
                    for c in 0..nc {
                        k[1 + cid[c] as usize * nv + self.vi[r * nc + c] as usize] += 1;
                    }
                    k
                })
                .collect();
            let new = rank_by(rid, keys);
            if new != rcount {
                rcount = new;
                changed = true;
            }
            let keys: Vec<Vec<u16>> = (0..nc)
                .map(|c| {
                    let mut k = vec![0u16; 1 + rcount * nv];
                    k[0] = cid[c] as u16;
                    for r in 0..nr {
                        k[1 + rid[r] as usize * nv + self.vi[r * nc + c] as usize] += 1;
                    }
                    k
                })
                .collect();
            let new = rank_by(cid, keys);
            if new != ccount {
                ccount = new;
                changed = true;
            }
            if !changed {
                break;
            }
        }
    }

    fn leaf(&self, rid: &[u32], cid: &[u32]) -> Leaf {
        let mut rows = vec![0; self.nr];
        for (r, &i) in rid.iter().enumerate() {
            rows[i as usize] = r;
        }
        let mut cols = vec![0; self.nc];
        for (c, &i) in cid.iter().enumerate() {
            cols[i as usize] = c;
        }
        let mut cert = Vec::with_capacity(self.nr * self.nc);
        for &r in &rows {
            for &c in &cols {
                cert.push(self.vals[r * self.nc + c]);
            }
        }
        Leaf { cert, rows, cols }
    }

    /// The automorphism carrying leaf `a` to leaf `b`.
    fn iso(&self, a: &Leaf, b: &Leaf) -> Perm {
        let mut p = vec![0u32; self.nr + self.nc];
        for i in 0..self.nr {
            p[a.rows[i]] = b.rows[i] as u32;
        }
        for j in 0..self.nc {
            p[self.nr + a.cols[j]] = (self.nr + b.cols[j]) as u32;
        }
        Perm(p)
    }

    fn add_gen(&mut self, g: Perm) {
        if !g.is_identity() && !self.gens.contains(&g) {
            self.gens.push(g);
        }
    }

    /// Explores the subtree; `Some(d)` asks the caller to unwind to depth `d`.
    fn dfs(&mut self, rid: &mut Vec<u32>, cid: &mut Vec<u32>, prefix: &mut Vec<usize>) -> Option<usize> {
        let row_target = first_nonsingleton(rid);
        let target: Vec<usize> = match row_target {
            Some(cell) => (0..self.nr).filter(|&r| rid[r] == cell).collect(),
            None => match first_nonsingleton(cid) {
                Some(cell) => (0..self.nc).filter(|&c| cid[c] == cell).map(|c| self.nr + c).collect(),
                None => return self.at_leaf(rid, cid, prefix),
            },
        };
        let depth = prefix.len();
        let mut tried: Vec<usize> = Vec::new();
        for &x in &target {
            if !tried.is_empty() && self.equivalent_to_tried(x, &tried, prefix) {
                continue;
            }
            tried.push(x);
            let (mut r2, mut c2) = (rid.clone(), cid.clone());
            individualize(&mut r2, &mut c2, x, self.nr);
            self.refine(&mut r2, &mut c2);
            prefix.push(x);
            let jump = self.dfs(&mut r2, &mut c2, prefix);
            prefix.pop();
            if let Some(d) = jump {
                if d < depth {
                    return Some(d);
                }
            }
        }
        None
    }

    fn at_leaf(&mut self, rid: &[u32], cid: &[u32], prefix: &[usize]) -> Option<usize> {
        let leaf = self.leaf(rid, cid);
        let Some(first) = &self.first else {
            self.first_path = prefix.to_vec();
            self.best = Some(Leaf {
                cert: leaf.cert.clone(),
                rows: leaf.rows.clone(),
                cols: leaf.cols.clone(),
            });
            self.first = Some(leaf);
            return None;
        };
        if leaf.cert == first.cert {
            let g = self.iso(first, &leaf);
            self.add_gen(g);
            let common = prefix
                .iter()
                .zip(&self.first_path)
                .take_while(|(a, b)| a == b)
                .count();
            return Some(common);
        }
        let best = self.best.as_ref().expect("set with first");
        match leaf.cert.cmp(&best.cert) {
            Ordering::Equal => {
                let g = self.iso(best, &leaf);
                self.add_gen(g);
            }
            Ordering::Less => self.best = Some(leaf),
            Ordering::Greater => {}
        }
        None
    }

    /// Whether `x` shares an orbit with a tried vertex under the automorphisms
    /// found so far that fix `prefix` pointwise.
    fn equivalent_to_tried(&self, x: usize, tried: &[usize], prefix: &[usize]) -> bool {
        let fixing: Vec<&Perm> = self
            .gens
            .iter()
            .filter(|g| prefix.iter().all(|&v| g.apply(v) == v))
            .collect();
        if fixing.is_empty() {
            return false;
        }
        let len = self.nr + self.nc;
        let mut parent: Vec<usize> = (0..len).collect();
        fn find(p: &mut [usize], mut a: usize) -> usize {
            while p[a] != a {
                p[a] = p[p[a]];
                a = p[a];
            }
            a
        }
        for g in fixing {
            for v in 0..len {
                let (a, b) = (find(&mut parent, v), find(&mut parent, g.apply(v)));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        let rx = find(&mut parent, x);
        tried.iter().any(|&y| find(&mut parent, y) == rx)
    }
}

fn first_nonsingleton(ids: &[u32]) -> Option<u32> {
    let mut counts = vec![0u32; ids.len()];
    for &i in ids {
        counts[i as usize] += 1;
    }
    counts.iter().position(|&c| c > 1).map(|c| c as u32)
}

fn individualize(rid: &mut [u32], cid: &mut [u32], x: usize, nr: usize) {
    let split = |ids: &mut [u32], v: usize| {
        let cell = ids[v];
        for (i, id) in ids.iter_mut().enumerate() {
            *id = 2 * *id + (*id == cell && i != v) as u32;
        }
        let keys = ids.to_vec();
        rank_by(ids, keys);
    };
    if x < nr {
        split(rid, x);
    } else {
        split(cid, x - nr);
    }
}

/// Canonical form of an `nr x nc` matrix under permutations of rows within
/// equal `row_colors` and columns within equal `col_colors`. Colors also
/// order the blocks.
pub fn canonical_matrix(vals: &[u8], nr: usize, nc: usize, row_colors: &[u8], col_colors: &[u8]) -> MatrixCanon {
    assert_eq!(vals.len(), nr * nc);
    let mut present: Vec<u8> = vals.to_vec();
    present.sort_unstable();
    present.dedup();
    let vi = vals
        .iter()
        .map(|v| present.binary_search(v).expect("present") as u8)
        .collect();
    let mut s = Search {
        vals,
        vi,
        nv: present.len(),
        nr,
        nc,
        first: None,
        best: None,
        first_path: Vec::new(),
        gens: Vec::new(),
    };
    let mut rid: Vec<u32> = row_colors.iter().map(|&c| c as u32).collect();
    let mut cid: Vec<u32> = col_colors.iter().map(|&c| c as u32).collect();
    rank_by(&mut rid, row_colors.to_vec());
    rank_by(&mut cid, col_colors.to_vec());
    s.refine(&mut rid, &mut cid);
    s.dfs(&mut rid, &mut cid, &mut Vec::new());
    let best = s.best.take().expect("search reaches a leaf");
    let order = group_order(nr + nc, &s.gens);
    MatrixCanon {
        cert: best.cert,
        row_order: best.rows,
        col_order: best.cols,
        gens: s.gens,
        order,
    }
}

/// Canonical encoding of a template up to isomorphism.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalForm(pub Vec<u8>);

impl CanonicalForm {
    pub fn to_hex(&self) -> String {
        hex::encode(&self.0)
    }
}

/// Symmetry of a template with respect to its squares.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SymmetryClass {
    /// Automorphisms induce every reordering of three squares.
    S3,
    /// Some automorphism exchanges two squares, but not all reorderings occur.
    C2,
    /// No automorphism reorders the squares.
    None,
}

impl std::fmt::Display for SymmetryClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SymmetryClass::S3 => "S3",
            SymmetryClass::C2 => "C2",
            SymmetryClass::None => "--",
        })
    }
}

/// Automorphism group of a template.
#[derive(Clone, Debug)]
pub struct AutGroup {
    pub order: u128,
    pub generators: Vec<TemplateIso>,
    /// Distinct square permutations induced by automorphisms (a subgroup of `S_m`).
    pub square_perms: Vec<Vec<usize>>,
}

impl AutGroup {
    pub fn symmetry_class(&self) -> SymmetryClass {
        let m = self.square_perms.first().map_or(0, Vec::len);
        let nontrivial = self
            .square_perms
            .iter()
            .filter(|p| p.iter().enumerate().any(|(i, &j)| i != j))
            .collect::<Vec<_>>();
        if m == 3 && self.square_perms.len() == 6 {
            SymmetryClass::S3
        } else if nontrivial
            .iter()
            .any(|p| p.iter().enumerate().filter(|&(i, &j)| i != j).count() == 2)
        {
            SymmetryClass::C2
        } else {
            SymmetryClass::None
        }
    }

    /// Generators of the subgroup fixing each square in `squares`.
    ///
    /// Every coset of the square-preserving subgroup has one generator, so
    /// filtering the generators yields the whole stabilizer.
    pub fn generators_fixing(&self, n: usize, squares: &[usize]) -> Vec<TemplateIso> {
        self.generators
            .iter()
            .filter(|g| {
                let p = g.square_perm(n);
                squares.iter().all(|&s| p[s] == s)
            })
            .cloned()
            .collect()
    }

    /// The pair of squares exchanged by some automorphism, if exactly one pair is.
    pub fn exchanged_pair(&self) -> Option<(usize, usize)> {
        let mut pairs: Vec<(usize, usize)> = self
            .square_perms
            .iter()
            .filter_map(|p| {
                let moved: Vec<usize> = (0..p.len()).filter(|&i| p[i] != i).collect();
                (moved.len() == 2).then(|| (moved[0], moved[1]))
            })
            .collect();
        pairs.sort();
        pairs.dedup();
        (pairs.len() == 1).then(|| pairs[0])
    }
}

/// Outer isomorphisms: optional transpose and square reorderings that keep the type.
fn outer_elements(t: &Template, allow_transpose: bool) -> Vec<(bool, Vec<usize>)> {
    let m = t.square_count();
    let l = t.lambdas();
    let transposes: &[bool] = if allow_transpose && l[0] == l[1] {
        &[false, true]
    } else {
        &[false]
    };
    let mut out = Vec::new();
    for &tr in transposes {
        for p in all_permutations(m) {
            if (0..m).all(|s| l[p[s] + 2] == l[s + 2]) {
                out.push((tr, p));
            }
        }
    }
    out
}

struct Image {
    cert: Vec<u8>,
    canon: MatrixCanon,
    transpose: bool,
    perm: Vec<usize>,
}

fn images(t: &Template, allow_transpose: bool) -> Vec<Image> {
    let n = t.order();
    let id: Vec<usize> = (0..n).collect();
    let (lr, lc) = (t.lambdas()[0], t.lambdas()[1]);
    outer_elements(t, allow_transpose)
        .into_iter()
        .map(|(tr, p)| {
            let img = t.apply(&TemplateIso::from_parts(&id, &id, tr, &p));
            let (ir, ic) = if tr { (lc, lr) } else { (lr, lc) };
            let rc: Vec<u8> = (0..n).map(|i| (i >= ir) as u8).collect();
            let cc: Vec<u8> = (0..n).map(|j| (j >= ic) as u8).collect();
            let canon = canonical_matrix(img.cells(), n, n, &rc, &cc);
            let mut cert = vec![n as u8, t.k() as u8];
            cert.extend(img.lambdas().iter().map(|&x| x as u8));
            cert.extend_from_slice(&canon.cert);
            Image {
                cert,
                canon,
                transpose: tr,
                perm: p,
            }
        })
        .collect()
}

/// Canonical form under the full isomorphism group.
pub fn canonical_form(t: &Template) -> CanonicalForm {
    canonical_form_with(t, true)
}

/// Canonical form, optionally without transposition (for partially filled templates).
pub fn canonical_form_with(t: &Template, allow_transpose: bool) -> CanonicalForm {
    let best = images(t, allow_transpose)
        .into_iter()
        .map(|i| i.cert)
        .min()
        .expect("identity image");
    CanonicalForm(best)
}

pub fn are_isomorphic(a: &Template, b: &Template) -> bool {
    let mut la = a.lambdas().to_vec();
    let mut lb = b.lambdas().to_vec();
    la.sort_unstable();
    lb.sort_unstable();
    a.order() == b.order() && la == lb && canonical_form(a) == canonical_form(b)
}

/// The automorphism group with generators and its induced action on squares.
pub fn automorphism_group(t: &Template) -> AutGroup {
    automorphism_group_with(t, true)
}

pub(crate) fn automorphism_group_with(t: &Template, allow_transpose: bool) -> AutGroup {
    let n = t.order();
    let m = t.square_count();
    let imgs = images(t, allow_transpose);
    let base = &imgs[0];
    debug_assert!(!base.transpose && base.perm.iter().enumerate().all(|(i, &j)| i == j));
    let lift = |g: &Perm| -> TemplateIso {
        let rows: Vec<usize> = (0..n).map(|r| g.apply(r)).collect();
        let cols: Vec<usize> = (0..n).map(|c| g.apply(n + c) - n).collect();
        TemplateIso::from_parts(&rows, &cols, false, &(0..m).collect::<Vec<_>>())
    };
    let mut generators: Vec<TemplateIso> = base.canon.gens.iter().map(lift).collect();
    let mut square_perms = Vec::new();
    let mut matching = 0u128;
    for img in &imgs {
        if img.cert != base.cert {
            continue;
        }
        matching += 1;
        square_perms.push(img.perm.clone());
        if std::ptr::eq(img, base) {
            continue;
        }
        // outer element, then the inner map taking the image's labeling onto the base's
        let id: Vec<usize> = (0..n).collect();
        let outer = TemplateIso::from_parts(&id, &id, img.transpose, &img.perm);
        let mut rows = vec![0usize; n];
        let mut cols = vec![0usize; n];
        for i in 0..n {
            rows[img.canon.row_order[i]] = base.canon.row_order[i];
            cols[img.canon.col_order[i]] = base.canon.col_order[i];
        }
        let inner = TemplateIso::from_parts(&rows, &cols, false, &(0..m).collect::<Vec<_>>());
        let g = TemplateIso(outer.0.then(&inner.0));
        debug_assert_eq!(&t.apply(&g), t);
        generators.push(g);
    }
    square_perms.sort();
    square_perms.dedup();
    AutGroup {
        order: base.canon.order * matching,
        generators,
        square_perms,
    }
}

#[cfg(test)]
mod tests {
    use super::super::tests::{FIG1, FIG2};
    use super::*;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_iso(t: &Template, rng: &mut ChaCha8Rng) -> TemplateIso {
        let n = t.order();
        let (lr, lc) = (t.lambdas()[0], t.lambdas()[1]);
        let block_perm = |split: usize, rng: &mut ChaCha8Rng| -> Vec<usize> {
            let mut a: Vec<usize> = (0..split).collect();
            let mut b: Vec<usize> = (split..n).collect();
            a.shuffle(rng);
            b.shuffle(rng);
            a.extend(b);
            a
        };
        let rows = block_perm(lr, rng);
        let cols = block_perm(lc, rng);
        let outer = outer_elements(t, true);
        let (tr, p) = outer[rng.gen_range(0..outer.len())].clone();
        TemplateIso::from_parts(&rows, &cols, tr, &p)
    }

    #[test]
    fn random_images_share_canonical_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for text in [FIG1, FIG2] {
            let t: Template = text.parse().unwrap();
            let c = canonical_form(&t);
            for _ in 0..1000 {
                let iso = random_iso(&t, &mut rng);
                assert!(iso.respects(&t));
                assert_eq!(canonical_form(&t.apply(&iso)), c);
            }
        }
    }

    #[test]
    fn transpose_is_isomorphic() {
        let t: Template = FIG1.parse().unwrap();
        assert!(are_isomorphic(&t, &t.transpose()));
    }

    #[test]
    fn generators_are_automorphisms() {
        for text in [FIG1, FIG2] {
            let t: Template = text.parse().unwrap();
            let aut = automorphism_group(&t);
            for g in &aut.generators {
                assert_eq!(&t.apply(g), &t);
            }
            let len = 2 * t.order() + t.square_count();
            let gens: Vec<Perm> = aut.generators.iter().map(|g| g.0.clone()).collect();
            assert_eq!(group_order(len, &gens), aut.order);
        }
    }

    #[test]
    fn fig2_group() {
        let t: Template = FIG2.parse().unwrap();
        let aut = automorphism_group(&t);
        assert_eq!(aut.order, 128);
        assert_eq!(aut.symmetry_class(), SymmetryClass::C2);
    }

    #[test]
    fn matrix_group_of_identity_pattern() {
        // 3x3 identity: automorphisms are simultaneous row/column permutations
        let vals = [1, 0, 0, 0, 1, 0, 0, 0, 1];
        let c = canonical_matrix(&vals, 3, 3, &[0; 3], &[0; 3]);
        assert_eq!(c.order, 6);
    }
}
