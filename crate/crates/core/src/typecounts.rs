//! Point-type counting for relations on nets of even order.
//!
//! A point of a net carrying a relation has a type: the binary string whose
//! bit `i` says whether the point lies on a relational line of class `i`.
//! Types are stored as bitmasks with bit `i` for class `i`, and printed with
//! class 0 first. For a relation every type has even weight, for an odd
//! relation odd weight. Orthogonality of lines gives linear equations on the
//! type counts `t_b`; this module builds them, counts their nonnegative
//! integer solutions, and evaluates the closed forms available for 4- and
//! 5-nets.

use std::fmt;

use num_rational::Ratio;

use crate::error::{Error, Result};

/// Formats mask `b` over `k` classes as a binary string, class 0 first.
pub fn type_string(b: u32, k: usize) -> String {
    (0..k).map(|i| if b >> i & 1 == 1 { '1' } else { '0' }).collect()
}

/// Parses a binary string with class 0 first.
pub fn parse_type(s: &str) -> Option<u32> {
    s.chars().enumerate().try_fold(0u32, |acc, (i, ch)| match ch {
        '0' => Some(acc),
        '1' => Some(acc | 1 << i),
        _ => None,
    })
}

/// All masks over `k` bits of the given weight parity, ascending.
pub fn types_of_parity(k: usize, odd: bool) -> Vec<u32> {
    (0u32..1 << k)
        .filter(|b| (b.count_ones() % 2 == 1) == odd)
        .collect()
}

fn check_lambdas(n: usize, lambdas: &[usize]) -> Result<()> {
    if n % 2 == 1 {
        return Err(Error::OddOrder(n));
    }
    if lambdas.len() < 2 || lambdas.len() > 16 {
        return Err(Error::UnsupportedClassCount(lambdas.len()));
    }
    for (class, &weight) in lambdas.iter().enumerate() {
        if weight > n {
            return Err(Error::WeightOutOfRange { class, weight, n });
        }
    }
    Ok(())
}

/// One linear equation over the type variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equation {
    /// Indices into [`TypeCountSystem::types`] with coefficient one.
    pub support: Vec<usize>,
    pub rhs: i64,
}

/// The counting equations for a relation of a given type.
#[derive(Clone, Debug)]
pub struct TypeCountSystem {
    pub n: usize,
    pub lambdas: Vec<usize>,
    pub odd: bool,
    /// Variable `v` counts points of type `types[v]`.
    pub types: Vec<u32>,
    pub equations: Vec<Equation>,
}

/// Builds the system for a relation (`odd = false`) or odd relation.
///
/// Equations, in order: the total point count; for each pair `i < j` the
/// points on relational lines of both classes; for each pair `i < j` the
/// points on non-relational lines of both; for each ordered pair `i != j`
/// the points relational in `i` and not in `j`.
pub fn build_system_with_parity(n: usize, lambdas: &[usize], odd: bool) -> Result<TypeCountSystem> {
    check_lambdas(n, lambdas)?;
    let k = lambdas.len();
    let types = types_of_parity(k, odd);
    let n_i = n as i64;
    let l: Vec<i64> = lambdas.iter().map(|&x| x as i64).collect();
    let select = |pred: &dyn Fn(u32) -> bool| -> Vec<usize> {
        (0..types.len()).filter(|&v| pred(types[v])).collect()
    };
    let mut equations = vec![Equation {
        support: (0..types.len()).collect(),
        rhs: n_i * n_i,
    }];
    for i in 0..k {
        for j in i + 1..k {
            equations.push(Equation {
                support: select(&|b| b >> i & 1 == 1 && b >> j & 1 == 1),
                rhs: l[i] * l[j],
            });
        }
    }
    for i in 0..k {
        for j in i + 1..k {
            equations.push(Equation {
                support: select(&|b| b >> i & 1 == 0 && b >> j & 1 == 0),
                rhs: (n_i - l[i]) * (n_i - l[j]),
            });
        }
    }
    for i in 0..k {
        for j in 0..k {
            if i != j {
                equations.push(Equation {
                    support: select(&|b| b >> i & 1 == 1 && b >> j & 1 == 0),
                    rhs: l[i] * (n_i - l[j]),
                });
            }
        }
    }
    Ok(TypeCountSystem {
        n,
        lambdas: lambdas.to_vec(),
        odd,
        types,
        equations,
    })
}

/// The system for an ordinary relation.
pub fn build_system(n: usize, lambdas: &[usize]) -> Result<TypeCountSystem> {
    build_system_with_parity(n, lambdas, false)
}

/// Cap on the count of the all-ones type implied by the relational lines of class `i`.
///
/// Every point of a relational line meets an odd number of relational lines
/// from the other classes, so only `sum_{j != i} λ_j - n` spare incidences
/// remain, and each all-ones point consumes four of them.
pub fn regularity_bound(n: usize, lambdas: &[usize], i: usize) -> i64 {
    let others: i64 = lambdas
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, &x)| x as i64)
        .sum();
    let spare = others - n as i64;
    if spare < 0 {
        return 0;
    }
    (lambdas[i] as i64 * (spare / 4)).max(0)
}

impl TypeCountSystem {
    pub fn k(&self) -> usize {
        self.lambdas.len()
    }

    pub fn variable_of(&self, b: u32) -> Option<usize> {
        self.types.iter().position(|&t| t == b)
    }

    /// Rank of the coefficient matrix.
    pub fn rank(&self) -> usize {
        self.echelon(&(0..self.types.len()).collect::<Vec<_>>()).pivots.len()
    }

    pub fn degrees_of_freedom(&self) -> usize {
        self.types.len() - self.rank()
    }

    /// Whether `t` is nonnegative and satisfies every equation.
    pub fn is_solution(&self, t: &[i64]) -> bool {
        t.iter().all(|&x| x >= 0) && self.satisfies(t)
    }

    /// Whether `t` satisfies every equation, signs aside.
    pub fn satisfies(&self, t: &[i64]) -> bool {
        self.equations
            .iter()
            .all(|e| e.support.iter().map(|&v| t[v]).sum::<i64>() == e.rhs)
    }

    /// Upper bound per variable: the smallest right-hand side among the
    /// equations containing it.
    fn box_bounds(&self, with_bound: bool) -> Vec<i64> {
        let mut u = vec![i64::MAX; self.types.len()];
        for e in &self.equations {
            for &v in &e.support {
                u[v] = u[v].min(e.rhs);
            }
        }
        if with_bound {
            let full = (1u32 << self.k()) - 1;
            if let Some(v) = self.variable_of(full) {
                for i in 0..self.k() {
                    u[v] = u[v].min(regularity_bound(self.n, &self.lambdas, i));
                }
            }
        }
        u
    }

    /// Reduced echelon form with columns taken in `order`.
    fn echelon(&self, order: &[usize]) -> Echelon {
        let m = self.types.len();
        let mut rows: Vec<Vec<Ratio<i64>>> = self
            .equations
            .iter()
            .map(|e| {
                let mut r = vec![Ratio::from_integer(0); m + 1];
                for &v in &e.support {
                    r[v] = Ratio::from_integer(1);
                }
                r[m] = Ratio::from_integer(e.rhs);
                r
            })
            .collect();
        let mut pivots = Vec::new();
        let mut top = 0;
        for &col in order {
            let Some(found) = (top..rows.len()).find(|&r| rows[r][col] != Ratio::from_integer(0)) else {
                continue;
            };
            rows.swap(top, found);
            let p = rows[top][col];
            for x in rows[top].iter_mut() {
                *x /= p;
            }
            let pivot = rows[top].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != top && row[col] != Ratio::from_integer(0) {
                    let f = row[col];
                    for (x, y) in row.iter_mut().zip(&pivot) {
                        *x -= f * y;
                    }
                }
            }
            pivots.push(col);
            top += 1;
        }
        let inconsistent = rows[top..]
            .iter()
            .any(|r| r[m] != Ratio::from_integer(0));
        rows.truncate(top);
        Echelon {
            rows,
            pivots,
            inconsistent,
        }
    }
}

struct Echelon {
    rows: Vec<Vec<Ratio<i64>>>,
    pivots: Vec<usize>,
    inconsistent: bool,
}

/// Integer form of the parameterization: for each pivot variable `p`,
/// `den * t_p = rhs - sum_f coef[f] * t_free[f]`.
struct Param {
    free: Vec<usize>,
    pivots: Vec<usize>,
    den: Vec<i64>,
    rhs: Vec<i64>,
    coef: Vec<Vec<i64>>,
    upper_free: Vec<i64>,
    upper_pivot: Vec<i64>,
}

fn lcm(a: i64, b: i64) -> i64 {
    fn gcd(a: i64, b: i64) -> i64 {
        if b == 0 {
            a.abs()
        } else {
            gcd(b, a % b)
        }
    }
    a / gcd(a, b) * b
}

impl Param {
    fn new(sys: &TypeCountSystem, order: &[usize], with_bound: bool) -> Option<Param> {
        let m = sys.types.len();
        let e = sys.echelon(order);
        if e.inconsistent {
            return None;
        }
        let mut is_pivot = vec![false; m];
        for &p in &e.pivots {
            is_pivot[p] = true;
        }
        let free: Vec<usize> = order.iter().copied().filter(|&c| !is_pivot[c]).collect();
        let mut den = Vec::new();
        let mut rhs = Vec::new();
        let mut coef = Vec::new();
        for row in &e.rows {
            let d = row.iter().fold(1i64, |acc, x| lcm(acc, *x.denom()));
            den.push(d);
            rhs.push((row[m] * d).to_integer());
            coef.push(free.iter().map(|&f| (row[f] * d).to_integer()).collect());
        }
        let u = sys.box_bounds(with_bound);
        Some(Param {
            upper_free: free.iter().map(|&f| u[f]).collect(),
            upper_pivot: e.pivots.iter().map(|&p| u[p]).collect(),
            free,
            pivots: e.pivots,
            den,
            rhs,
            coef,
        })
    }

    /// Range of free variable `d` given the residuals `res[p] = rhs[p] -
    /// sum_{f < d} coef[p][f] x_f`, using the box for the later variables.
    fn range(&self, d: usize, res: &[i64], lo_suffix: &[Vec<i64>], hi_suffix: &[Vec<i64>]) -> Option<(i64, i64)> {
        let mut lo = 0i64;
        let mut hi = self.upper_free[d];
        for p in 0..self.pivots.len() {
            let a = self.coef[p][d];
            // remaining contribution of later variables lies in [lo_s, hi_s]
            let (lo_s, hi_s) = (lo_suffix[d + 1][p], hi_suffix[d + 1][p]);
            // need 0 <= res - a x - s <= den * U for some s in [lo_s, hi_s]
            // i.e.  res - a x - hi_s <= den*U   and   res - a x - lo_s >= 0
            let upper_val = self.den[p].saturating_mul(self.upper_pivot[p]);
            let r_lo = res[p] - lo_s; // a x <= r_lo
            let r_hi = res[p] - hi_s - upper_val; // a x >= r_hi
            match a.signum() {
                0 => {
                    if r_lo < 0 || r_hi > 0 {
                        return None;
                    }
                }
                1 => {
                    hi = hi.min(r_lo.div_euclid(a));
                    lo = lo.max(-((-r_hi).div_euclid(a)));
                }
                _ => {
                    let b = -a; // -b x <= r_lo  =>  x >= -r_lo / b
                    lo = lo.max(-(r_lo.div_euclid(b)));
                    hi = hi.min((-r_hi).div_euclid(b));
                }
            }
            if lo > hi {
                return None;
            }
        }
        Some((lo, hi))
    }

    fn suffix_sums(&self) -> (Vec<Vec<i64>>, Vec<Vec<i64>>) {
        let nf = self.free.len();
        let np = self.pivots.len();
        let mut lo = vec![vec![0i64; np]; nf + 1];
        let mut hi = vec![vec![0i64; np]; nf + 1];
        for d in (0..nf).rev() {
            for p in 0..np {
                let c = self.coef[p][d].saturating_mul(self.upper_free[d]);
                lo[d][p] = lo[d + 1][p].saturating_add(c.min(0));
                hi[d][p] = hi[d + 1][p].saturating_add(c.max(0));
            }
        }
        (lo, hi)
    }
}

/// Enumerates nonnegative integer solutions by depth-first search over the
/// free variables in ascending order, calling `sink` with each full vector.
///
/// `first` restricts the first free variable to one value, which lets callers
/// split the work; the totals over all values add up to the unrestricted count.
pub struct Enumerator {
    param: Option<Param>,
    m: usize,
    lo_suffix: Vec<Vec<i64>>,
    hi_suffix: Vec<Vec<i64>>,
}

impl Enumerator {
    pub fn new(sys: &TypeCountSystem, with_bound: bool) -> Self {
        let order: Vec<usize> = (0..sys.types.len()).collect();
        Self::with_order(sys, with_bound, &order)
    }

    /// Uses a custom column order for the elimination.
    pub fn with_order(sys: &TypeCountSystem, with_bound: bool, order: &[usize]) -> Self {
        let param = Param::new(sys, order, with_bound);
        let (lo_suffix, hi_suffix) = param
            .as_ref()
            .map(|p| p.suffix_sums())
            .unwrap_or_default();
        Enumerator {
            param,
            m: sys.types.len(),
            lo_suffix,
            hi_suffix,
        }
    }

    /// Feasible values for the first free variable.
    pub fn first_values(&self) -> Vec<i64> {
        match &self.param {
            None => vec![],
            Some(p) if p.free.is_empty() => vec![0],
            Some(p) => match p.range(0, &p.rhs, &self.lo_suffix, &self.hi_suffix) {
                Some((lo, hi)) => (lo..=hi).collect(),
                None => vec![],
            },
        }
    }

    pub fn count(&self) -> u64 {
        self.run(None, &mut |_| {})
    }

    pub fn count_with_first(&self, value: i64) -> u64 {
        self.run(Some(value), &mut |_| {})
    }

    pub fn for_each(&self, sink: &mut dyn FnMut(&[i64])) -> u64 {
        self.run(None, sink)
    }

    fn run(&self, first: Option<i64>, sink: &mut dyn FnMut(&[i64])) -> u64 {
        let Some(p) = &self.param else {
            return 0;
        };
        let mut x = vec![0i64; p.free.len()];
        let mut count = 0;
        let mut res = p.rhs.clone();
        self.dfs(p, 0, first, &mut x, &mut res, &mut count, sink);
        count
    }

    #[allow(clippy::too_many_arguments)]
    fn dfs(
        &self,
        p: &Param,
        d: usize,
        first: Option<i64>,
        x: &mut [i64],
        res: &mut Vec<i64>,
        count: &mut u64,
        sink: &mut dyn FnMut(&[i64]),
    ) {
        if d == p.free.len() {
            let mut t = vec![0i64; self.m];
            for (pi, &v) in p.pivots.iter().enumerate() {
                if res[pi] < 0 || res[pi] % p.den[pi] != 0 {
                    return;
                }
                let val = res[pi] / p.den[pi];
                if val > p.upper_pivot[pi] {
                    return;
                }
                t[v] = val;
            }
            for (fi, &v) in p.free.iter().enumerate() {
                t[v] = x[fi];
            }
            *count += 1;
            sink(&t);
            return;
        }
        let Some((mut lo, mut hi)) = p.range(d, res, &self.lo_suffix, &self.hi_suffix) else {
            return;
        };
        if d == 0 {
            if let Some(v) = first {
                lo = lo.max(v);
                hi = hi.min(v);
            }
        }
        for v in lo..=hi {
            x[d] = v;
            for (pi, r) in res.iter_mut().enumerate() {
                *r -= p.coef[pi][d] * v;
            }
            self.dfs(p, d + 1, None, x, res, count, sink);
            for (pi, r) in res.iter_mut().enumerate() {
                *r += p.coef[pi][d] * v;
            }
        }
    }
}

/// Number of nonnegative integer solutions, optionally with the regularity cap.
pub fn enumerate_solutions(sys: &TypeCountSystem, with_bound: bool) -> u64 {
    Enumerator::new(sys, with_bound).count()
}

/// `t_b + t_{b̄}` for a 6-net relation, which every solution must match.
pub fn complement_sum(b: u32, n: usize, lambdas: &[usize]) -> Result<i64> {
    let g = gs(n, lambdas);
    let k = lambdas.len();
    let mut s2 = 0i64;
    for i in 0..k {
        for j in i + 1..k {
            s2 += sign(b, i) * sign(b, j) * g[i] * g[j];
        }
    }
    divide(n as i64 * n as i64 + 4 * s2, 16)
}

fn gs(n: usize, lambdas: &[usize]) -> Vec<i64> {
    lambdas
        .iter()
        .map(|&l| n as i64 / 2 - l as i64)
        .collect()
}

fn sign(b: u32, i: usize) -> i64 {
    if b >> i & 1 == 1 {
        -1
    } else {
        1
    }
}

fn divide(num: i64, den: i64) -> Result<i64> {
    if num % den != 0 {
        return Err(Error::NonIntegral {
            numerator: num,
            denominator: den,
        });
    }
    Ok(num / den)
}

/// Counts `t_b` indexed by type mask.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointTypeVector {
    pub k: usize,
    pub entries: Vec<(u32, i64)>,
}

impl PointTypeVector {
    pub fn get(&self, b: u32) -> Option<i64> {
        self.entries.iter().find(|e| e.0 == b).map(|e| e.1)
    }

    pub fn total(&self) -> i64 {
        self.entries.iter().map(|e| e.1).sum()
    }

    /// Types with a negative count; nonempty means the relation type cannot occur.
    pub fn negative_types(&self) -> Vec<u32> {
        self.entries
            .iter()
            .filter(|e| e.1 < 0)
            .map(|e| e.0)
            .collect()
    }

    pub fn is_feasible(&self) -> bool {
        self.entries.iter().all(|e| e.1 >= 0)
    }
}

impl fmt::Display for PointTypeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (b, t)) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str("\t")?;
            }
            write!(f, "{}={}", type_string(*b, self.k), t)?;
        }
        Ok(())
    }
}

/// Closed form for 4- and 5-nets, with `flip` selecting the odd variant.
///
/// With `g_i = n/2 - λ_i` and `s_i = (-1)^{b_i}`:
/// `t_b = n^2/2^{k-1} + (n/2^{k-2}) Σ s_i g_i + (1/4) Σ_{i<j} s_i s_j g_i g_j`.
/// The odd variant evaluates this at `b` with bit `flip` toggled and `g_flip`
/// negated, over odd-weight `b`.
fn closed_form(n: usize, lambdas: &[usize], flip: Option<usize>) -> Result<PointTypeVector> {
    check_lambdas(n, lambdas)?;
    let k = lambdas.len();
    if k != 4 && k != 5 {
        return Err(Error::UnsupportedClassCount(k));
    }
    let mut g = gs(n, lambdas);
    if let Some(f) = flip {
        if f >= k {
            return Err(Error::UnsupportedClassCount(f));
        }
        g[f] = -g[f];
    }
    let n = n as i64;
    // scale everything by 16
    let (c0, c1) = if k == 4 { (2 * n * n, 4 * n) } else { (n * n, 2 * n) };
    let mut entries = Vec::new();
    for b in types_of_parity(k, flip.is_some()) {
        let eff = match flip {
            Some(f) => b ^ 1 << f,
            None => b,
        };
        let s1: i64 = (0..k).map(|i| sign(eff, i) * g[i]).sum();
        let mut s2 = 0;
        for i in 0..k {
            for j in i + 1..k {
                s2 += sign(eff, i) * sign(eff, j) * g[i] * g[j];
            }
        }
        entries.push((b, divide(c0 + c1 * s1 + 4 * s2, 16)?));
    }
    let v = PointTypeVector { k, entries };
    if !v.is_feasible() {
        return Ok(v);
    }
    // a nonnegative vector is only meaningful if the system is consistent
    let sys = build_system_with_parity(n as usize, lambdas, flip.is_some())?;
    let t: Vec<i64> = sys
        .types
        .iter()
        .map(|&b| v.entries.iter().find(|e| e.0 == b).map_or(0, |e| e.1))
        .collect();
    if !sys.satisfies(&t) {
        return Err(Error::InconsistentWeights(lambdas.to_vec()));
    }
    Ok(v)
}

pub fn counts_5net(n: usize, lambdas: &[usize]) -> Result<PointTypeVector> {
    if lambdas.len() != 5 {
        return Err(Error::UnsupportedClassCount(lambdas.len()));
    }
    closed_form(n, lambdas, None)
}

pub fn counts_4net(n: usize, lambdas: &[usize]) -> Result<PointTypeVector> {
    if lambdas.len() != 4 {
        return Err(Error::UnsupportedClassCount(lambdas.len()));
    }
    closed_form(n, lambdas, None)
}

/// Counts for an odd relation whose odd class is `flip_index`.
pub fn odd_variant(n: usize, lambdas: &[usize], flip_index: usize) -> Result<PointTypeVector> {
    closed_form(n, lambdas, Some(flip_index))
}

/// One row of the 6-net solution-count table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableRow {
    pub label: &'static str,
    pub lambdas: [usize; 6],
    pub without_bound: u64,
    pub with_bound: u64,
    /// The single solution is ruled out by an argument outside this system.
    pub eliminated_externally: bool,
}

/// Relation types on a 6-net of order 10 with all weights in `1..10`, up to equivalence.
pub const TABLE_TYPES: [(&str, [usize; 6], bool); 7] = [
    ("2^6", [2, 2, 2, 2, 2, 2], false),
    ("2^5 6", [2, 2, 2, 2, 2, 6], true),
    ("2^4 4^2", [2, 2, 2, 2, 4, 4], false),
    ("2^3 4^2 6", [2, 2, 2, 4, 4, 6], false),
    ("2^2 4^4", [2, 2, 4, 4, 4, 4], false),
    ("2 4^4 6", [2, 4, 4, 4, 4, 6], false),
    ("4^6", [4, 4, 4, 4, 4, 4], false),
];

/// Counts one table row; `count` may parallelize over first-variable values.
pub fn table_row(
    entry: (&'static str, [usize; 6], bool),
    count: &dyn Fn(&Enumerator) -> u64,
) -> Result<TableRow> {
    let (label, lambdas, ext) = entry;
    let sys = build_system(10, &lambdas)?;
    Ok(TableRow {
        label,
        lambdas,
        without_bound: count(&Enumerator::new(&sys, false)),
        with_bound: count(&Enumerator::new(&sys, true)),
        eliminated_externally: ext,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_net_system_shape() {
        let sys = build_system(10, &[4, 4, 4, 4, 4, 4]).unwrap();
        assert_eq!(sys.equations.len(), 61);
        assert_eq!(sys.types.len(), 32);
        assert_eq!(sys.degrees_of_freedom(), 10);
        let other = build_system(10, &[2, 2, 2, 4, 4, 6]).unwrap();
        assert_eq!(other.degrees_of_freedom(), 10);
    }

    #[test]
    fn zero_type_has_unique_solution() {
        let sys = build_system(10, &[0; 6]).unwrap();
        let mut sols = Vec::new();
        Enumerator::new(&sys, false).for_each(&mut |t| sols.push(t.to_vec()));
        assert_eq!(sols.len(), 1);
        assert_eq!(sols[0][0], 100);
        assert!(sols[0][1..].iter().all(|&x| x == 0));
    }

    #[test]
    fn odd_order_rejected() {
        assert!(matches!(build_system(9, &[2; 6]), Err(Error::OddOrder(9))));
    }

    #[test]
    fn small_table_rows() {
        let sys = build_system(10, &[2; 6]).unwrap();
        assert_eq!(enumerate_solutions(&sys, false), 1);
        assert_eq!(enumerate_solutions(&sys, true), 1);
        let sys = build_system(10, &[2, 2, 2, 2, 4, 4]).unwrap();
        assert_eq!(enumerate_solutions(&sys, false), 146);
        assert_eq!(enumerate_solutions(&sys, true), 130);
    }

    #[test]
    fn regularity_examples() {
        assert_eq!(regularity_bound(10, &[4; 6], 0), 8);
        assert_eq!(regularity_bound(10, &[2, 2, 2, 2, 2, 0], 0), 0);
    }

    #[test]
    fn four_net_closed_form() {
        let t = counts_4net(10, &[4, 4, 4, 4]).unwrap();
        assert_eq!(t.get(0b0000), Some(24));
        assert_eq!(t.get(0b1111), Some(4));
        for b in types_of_parity(4, false).into_iter().filter(|b| b.count_ones() == 2) {
            assert_eq!(t.get(b), Some(12));
        }
        assert_eq!(t.total(), 100);
        let two_full = counts_4net(10, &[10, 10, 0, 0]).unwrap();
        assert_eq!(two_full.get(0b0011), Some(100));
        assert_eq!(two_full.total(), 100);
    }

    #[test]
    fn eliminations_by_negativity() {
        for l in [[2, 2, 2, 2], [2, 2, 2, 6], [2, 2, 4, 4]] {
            let t = counts_4net(10, &l).unwrap();
            assert_eq!(t.negative_types(), vec![0b1111], "{l:?}");
        }
        let t = counts_5net(10, &[2, 2, 2, 2, 4]).unwrap();
        let mut neg: Vec<String> = t.negative_types().iter().map(|&b| type_string(b, 5)).collect();
        neg.sort();
        assert_eq!(neg, vec!["01111", "10111", "11011", "11101"]);
    }

    #[test]
    fn odd_variant_counts() {
        let t = odd_variant(10, &[4, 4, 2, 2, 2], 4).unwrap();
        let get = |s: &str| t.get(parse_type(s).unwrap()).unwrap();
        assert_eq!(get("10000"), 24);
        assert_eq!(get("01000"), 24);
        for s in ["00100", "00010", "00001"] {
            assert_eq!(get(s), 12);
        }
        for s in ["11100", "11010", "11001", "11111"] {
            assert_eq!(get(s), 4);
        }
        assert_eq!(t.total(), 100);
    }

    #[test]
    fn odd_variant_with_zero_g_is_plain() {
        let l = [2, 2, 6, 6, 4];
        let plain = counts_5net(8, &l).unwrap();
        let odd = odd_variant(8, &l, 4).unwrap();
        for (b, v) in &odd.entries {
            assert_eq!(plain.get(b ^ 1 << 4), Some(*v));
        }
    }

    #[test]
    fn complement_sum_is_symmetric() {
        let l = [2, 2, 2, 4, 4, 6];
        for b in types_of_parity(6, false) {
            assert_eq!(complement_sum(b, 10, &l).unwrap(), complement_sum(!b & 63, 10, &l).unwrap());
        }
        for b in types_of_parity(6, false) {
            assert_eq!(complement_sum(b, 8, &[4; 6]).unwrap(), 4);
        }
    }

    #[test]
    fn split_sums_to_total() {
        let sys = build_system(10, &[2, 2, 2, 4, 4, 6]).unwrap();
        let e = Enumerator::new(&sys, false);
        let split: u64 = e.first_values().iter().map(|&v| e.count_with_first(v)).sum();
        assert_eq!(split, e.count());
        assert_eq!(split, 1302);
    }
}
