//! Permutations and permutation-group orders via Schreier–Sims.

use std::collections::HashMap;

/// A permutation of `0..len`; `p[i]` is the image of `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(pub Vec<u32>);

impl Perm {
    pub fn identity(len: usize) -> Self {
        Perm((0..len as u32).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.0[i] as usize
    }

    /// `self` then `other`.
    pub fn then(&self, other: &Perm) -> Perm {
        Perm(self.0.iter().map(|&i| other.0[i as usize]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u32; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j as usize] = i as u32;
        }
        Perm(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i as u32 == j)
    }
}

/// Stabilizer chain of the group generated by the given permutations.
pub struct StabChain {
    len: usize,
    base: Vec<usize>,
    strong: Vec<Perm>,
    /// Per level: point -> element mapping the base point to it.
    transversals: Vec<HashMap<usize, Perm>>,
}

impl StabChain {
    pub fn new(len: usize, gens: &[Perm]) -> Self {
        let mut chain = StabChain {
            len,
            base: Vec::new(),
            strong: Vec::new(),
            transversals: Vec::new(),
        };
        for g in gens.iter().filter(|g| !g.is_identity()) {
            chain.strong.push(g.clone());
            chain.cover(g);
        }
        chain.complete();
        chain
    }

    /// Extends the base so that `g` moves some base point.
    fn cover(&mut self, g: &Perm) {
        if self.base.iter().all(|&b| g.apply(b) == b) {
            let p = (0..self.len).find(|&p| g.apply(p) != p).expect("non-identity");
            self.base.push(p);
        }
    }

    fn level_gens(&self, i: usize) -> Vec<&Perm> {
        self.strong
            .iter()
            .filter(|s| self.base[..i].iter().all(|&b| s.apply(b) == b))
            .collect()
    }

    fn orbit(&self, i: usize) -> HashMap<usize, Perm> {
        let gens = self.level_gens(i);
        let b = self.base[i];
        let mut t = HashMap::new();
        t.insert(b, Perm::identity(self.len));
        let mut queue = vec![b];
        while let Some(p) = queue.pop() {
            let tp = t[&p].clone();
            for s in &gens {
                let q = s.apply(p);
                if let std::collections::hash_map::Entry::Vacant(e) = t.entry(q) {
                    e.insert(tp.then(s));
                    queue.push(q);
                }
            }
        }
        t
    }

    /// Sifts `g` through levels `from..`; returns the residue and the level reached.
    fn sift_from(&self, from: usize, g: &Perm) -> (Perm, usize) {
        let mut h = g.clone();
        for i in from..self.base.len() {
            match self.transversals[i].get(&h.apply(self.base[i])) {
                Some(t) => h = h.then(&t.inverse()),
                None => return (h, i),
            }
        }
        (h, self.base.len())
    }

    fn complete(&mut self) {
        self.transversals = vec![HashMap::new(); self.base.len()];
        for i in (0..self.base.len()).rev() {
            self.transversals[i] = self.orbit(i);
        }
        let mut i = self.base.len();
        while i > 0 {
            i -= 1;
            self.transversals[i] = self.orbit(i);
            let mut restart = None;
            'scan: for (&p, tp) in &self.transversals[i] {
                for s in self.level_gens(i) {
                    let q = s.apply(p);
                    let sg = tp.then(s).then(&self.transversals[i][&q].inverse());
                    let (h, j) = self.sift_from(i + 1, &sg);
                    if j < self.base.len() || !h.is_identity() {
                        restart = Some((h, j));
                        break 'scan;
                    }
                }
            }
            if let Some((h, j)) = restart {
                self.strong.push(h.clone());
                if j == self.base.len() {
                    self.cover(&h);
                    self.transversals.push(HashMap::new());
                }
                for l in (i + 1..=j).rev() {
                    self.transversals[l] = self.orbit(l);
                }
                i = j + 1;
            }
        }
    }

    /// Group order as `u128`; saturates on overflow.
    pub fn order(&self) -> u128 {
        self.transversals
            .iter()
            .fold(1u128, |acc, t| acc.saturating_mul(t.len() as u128))
    }

    pub fn contains(&self, g: &Perm) -> bool {
        let (h, level) = self.sift_from(0, g);
        level == self.base.len() && h.is_identity()
    }
}

/// Order of the group generated by `gens` on `0..len`.
pub fn group_order(len: usize, gens: &[Perm]) -> u128 {
    StabChain::new(len, gens).order()
}

/// All permutations of `0..m` as image vectors, in lexicographic order.
pub fn all_permutations(m: usize) -> Vec<Vec<usize>> {
    if m == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in all_permutations(m - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, m - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_group_orders() {
        for n in 2..7usize {
            let cycle = Perm((1..n as u32).chain([0]).collect());
            let mut swap = Perm::identity(n);
            swap.0.swap(0, 1);
            let f = (1..=n as u128).product::<u128>();
            assert_eq!(group_order(n, &[cycle, swap]), f);
        }
    }

    #[test]
    fn cyclic_and_trivial() {
        let c = Perm(vec![1, 2, 3, 4, 0]);
        assert_eq!(group_order(5, std::slice::from_ref(&c)), 5);
        assert_eq!(group_order(5, &[]), 1);
        assert!(StabChain::new(5, std::slice::from_ref(&c)).contains(&c.then(&c)));
        let mut swap = Perm::identity(5);
        swap.0.swap(0, 1);
        assert!(!StabChain::new(5, &[c]).contains(&swap));
    }

    fn closure_size(len: usize, gens: &[Perm]) -> usize {
        let mut seen = std::collections::HashSet::new();
        let mut queue = vec![Perm::identity(len)];
        seen.insert(queue[0].clone());
        while let Some(p) = queue.pop() {
            for g in gens {
                let q = p.then(g);
                if seen.insert(q.clone()) {
                    queue.push(q);
                }
            }
        }
        seen.len()
    }

    proptest::proptest! {
        #[test]
        fn order_matches_closure(seeds in proptest::collection::vec(proptest::collection::vec(0u32..1000, 7), 0..4)) {
            let gens: Vec<Perm> = seeds.iter().map(|keys| {
                let mut idx: Vec<u32> = (0..7).collect();
                idx.sort_by_key(|&i| keys[i as usize]);
                Perm(idx)
            }).collect();
            proptest::prop_assert_eq!(group_order(7, &gens), closure_size(7, &gens) as u128);
        }
    }

    #[test]
    fn direct_product() {
        // S3 on {0,1,2} x S2 on {3,4}
        let a = Perm(vec![1, 2, 0, 3, 4]);
        let b = Perm(vec![1, 0, 2, 3, 4]);
        let c = Perm(vec![0, 1, 2, 4, 3]);
        assert_eq!(group_order(5, &[a, b, c]), 12);
    }
}
